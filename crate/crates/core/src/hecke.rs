//! Hecke operators, both on q-expansions and as exact matrices on cuspidal
//! modular symbols.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::algebra::{rat, NFElement, NumberField, QMatrix};
use crate::congruence::{is_prime, prime_factors, Level, Mat2};
use crate::modsym::{CuspidalSubspace, ModSymSpace};
use crate::{Error, Result};

/// Truncated q-expansion `Σ_{m=1}^{order} c_m q^m` with coefficients in a
/// number field (Q for rational forms).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QExpansion {
    field: Arc<NumberField>,
    coeffs: Vec<NFElement>,
}

impl QExpansion {
    /// `coeffs[m - 1]` is `c_m`.
    pub fn new(field: &Arc<NumberField>, coeffs: Vec<NFElement>) -> Self {
        Self {
            field: field.clone(),
            coeffs,
        }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        let q = NumberField::rationals();
        let c = coeffs.iter().map(|&x| NFElement::from_i64(&q, x)).collect();
        Self {
            field: q,
            coeffs: c,
        }
    }

    /// Builds a normalized eigenform expansion from its prime coefficients
    /// using `c_{mn} = c_m c_n` for coprime `m, n`, and
    /// `c_{p^{k+1}} = c_p c_{p^k} − p c_{p^{k−1}}` (`c_{p^k} = c_p^k` when `p | N`).
    pub fn from_prime_coefficients(
        level: Level,
        field: &Arc<NumberField>,
        order: usize,
        mut a_p: impl FnMut(u64) -> Result<NFElement>,
    ) -> Result<Self> {
        let n = level.get();
        let mut c = vec![NFElement::zero(field); order + 1];
        if order >= 1 {
            c[1] = NFElement::one(field);
        }
        for m in 2..=order {
            let p = prime_factors(m as u64)[0] as usize;
            let mut pk = p;
            while (m / pk).is_multiple_of(p) {
                pk *= p;
            }
            let rest = m / pk;
            if rest > 1 {
                c[m] = &c[pk] * &c[rest];
                continue;
            }
            // m is a prime power p^k
            if pk == p {
                c[m] = a_p(p as u64)?;
            } else if n.is_multiple_of(p as u64) {
                c[m] = &c[p] * &c[m / p];
            } else {
                let t = &c[p] * &c[m / p];
                c[m] = &t - &c[m / p / p].scale(&rat(p as i64));
            }
        }
        c.remove(0);
        Ok(Self {
            field: field.clone(),
            coeffs: c,
        })
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn truncation_order(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficient `c_m` for `1 <= m <= order`.
    pub fn coeff(&self, m: usize) -> &NFElement {
        &self.coeffs[m - 1]
    }

    pub fn coeffs(&self) -> &[NFElement] {
        &self.coeffs
    }

    pub fn scale(&self, x: &NFElement) -> Self {
        Self {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| c * x).collect(),
        }
    }
}

fn divisors(n: usize) -> impl Iterator<Item = usize> {
    (1..=n).filter(move |d| n.is_multiple_of(*d))
}

/// `T_n f` with coefficients `γ(m) = Σ_{a | gcd(m, n)} a c_{mn/a²}`, to the
/// largest order the input supports, `floor(order / n)`.
pub fn hecke_qexp(n: usize, f: &QExpansion) -> Result<QExpansion> {
    hecke_qexp_to(n, f, f.truncation_order() / n.max(1))
}

/// `T_n f` truncated at `out_order`; needs `n · out_order` input coefficients.
pub fn hecke_qexp_to(n: usize, f: &QExpansion, out_order: usize) -> Result<QExpansion> {
    if n == 0 {
        return Err(Error::Domain(
            "Hecke operators are indexed by n >= 1".into(),
        ));
    }
    let need = n * out_order.max(1);
    if f.truncation_order() < need {
        return Err(Error::Truncation {
            have: f.truncation_order(),
            need,
        });
    }
    let coeffs = (1..=out_order)
        .map(|m| {
            let g = num_integer::gcd(m, n);
            divisors(g).fold(NFElement::zero(&f.field), |acc, a| {
                let c = f.coeff(m * n / (a * a)).scale(&rat(a as i64));
                &acc + &c
            })
        })
        .collect();
    Ok(QExpansion {
        field: f.field.clone(),
        coeffs,
    })
}

/// Cremona's Heilbronn matrices of determinant `p` for a prime `p`.
pub fn heilbronn_cremona(p: u64) -> Vec<Mat2> {
    let p = p as i64;
    if p == 2 {
        return vec![
            [[1, 0], [0, 2]],
            [[2, 0], [0, 1]],
            [[2, 1], [0, 1]],
            [[1, 0], [1, 2]],
        ];
    }
    let mut out = vec![[[1, 0], [0, p]]];
    let half = (p - 1) / 2;
    for r in -half..=half {
        let (mut x1, mut x2, mut y1, mut y2) = (p, -r, 0i64, 1i64);
        let (mut a, mut b) = (-p, r);
        out.push([[x1, x2], [y1, y2]]);
        while b != 0 {
            let q = (a as f64 / b as f64).round() as i64;
            let c = a - b * q;
            a = -b;
            b = c;
            let x3 = q * x2 - x1;
            x1 = x2;
            x2 = x3;
            let y3 = q * y2 - y1;
            y1 = y2;
            y2 = y3;
            out.push([[x1, x2], [y1, y2]]);
        }
    }
    out
}

/// Merel's matrices `[[a, b], [c, d]]` with `ad − bc = n`, `a > b >= 0`,
/// `d > c >= 0`. Valid for every `n`, including divisors of the level.
pub fn heilbronn_merel(n: u64) -> Vec<Mat2> {
    let n = n as i64;
    let mut out = Vec::new();
    for a in 1..=n {
        let q = n / a;
        if q * a == n {
            out.extend((0..a).map(|b| [[a, b], [0, q]]));
            out.extend((1..q).map(|c| [[a, 0], [c, q]]));
        }
        for d in q + 1..=n {
            let bc = a * d - n;
            for c in bc / a + 1..d {
                if bc % c == 0 {
                    out.push([[a, bc / c], [c, d]]);
                }
            }
        }
    }
    out
}

/// Matrix family realizing `T_p` on Manin symbols of level `N`.
pub fn heilbronn_family(p: u64, n: Level) -> Vec<Mat2> {
    if n.get().is_multiple_of(p) {
        heilbronn_merel(p)
    } else {
        heilbronn_cremona(p)
    }
}

/// `T_p` on the full modular-symbols space.
pub fn hecke_matrix_ambient(p: u64, space: &ModSymSpace) -> Result<QMatrix> {
    if !is_prime(p) {
        return Err(Error::Domain(format!(
            "{p} is not prime; build T_n from prime operators with hecke_matrix_n"
        )));
    }
    Ok(space.action_matrix(&heilbronn_family(p, space.level())))
}

/// An exact Hecke matrix on cuspidal coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeckeMatrix {
    pub n: u64,
    pub level: Level,
    pub matrix: QMatrix,
}

/// `T_p` restricted to the cuspidal subspace.
pub fn hecke_matrix(p: u64, s: &CuspidalSubspace) -> Result<HeckeMatrix> {
    let ambient = hecke_matrix_ambient(p, &s.space)?;
    Ok(HeckeMatrix {
        n: p,
        level: s.level(),
        matrix: s.restrict(&ambient),
    })
}

/// `T_n` for composite `n` via `T_{mn} = T_m T_n` (coprime) and
/// `T_{p^{k+1}} = T_p T_{p^k} − p T_{p^{k−1}}` (`T_{p^k} = T_p^k` for `p | N`).
pub fn hecke_matrix_n(n: u64, s: &CuspidalSubspace) -> Result<HeckeMatrix> {
    if n == 0 {
        return Err(Error::Domain(
            "Hecke operators are indexed by n >= 1".into(),
        ));
    }
    let dim = s.dimension();
    let level = s.level();
    let mut result = QMatrix::identity(dim);
    let mut rest = n;
    for p in prime_factors(n) {
        let mut k = 0;
        while rest.is_multiple_of(p) {
            rest /= p;
            k += 1;
        }
        let tp = hecke_matrix(p, s)?.matrix;
        let (mut prev, mut cur) = (QMatrix::identity(dim), tp.clone());
        for _ in 1..k {
            let next = if level.get().is_multiple_of(p) {
                &tp * &cur
            } else {
                &(&tp * &cur) - &prev.scale(&rat(p as i64))
            };
            prev = cur;
            cur = next;
        }
        result = &result * &cur;
    }
    Ok(HeckeMatrix {
        n,
        level,
        matrix: result,
    })
}

/// True iff every pair of operators commutes exactly.
pub fn verify_commutativity(ops: &[HeckeMatrix]) -> Result<bool> {
    if let Some(first) = ops.first() {
        if ops.iter().any(|t| t.level != first.level) {
            return Err(Error::Domain("Hecke matrices from different levels".into()));
        }
    }
    Ok(ops.iter().enumerate().all(|(i, a)| {
        ops[i + 1..]
            .iter()
            .all(|b| a.matrix.commutes_with(&b.matrix))
    }))
}

/// Tallies Heilbronn images of one symbol: P¹ index to multiplicity.
pub fn hecke_image_counts(p: u64, sym: usize, space: &ModSymSpace) -> BTreeMap<usize, i64> {
    space
        .image_counts(sym, &heilbronn_family(p, space.level()))
        .into_iter()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::QPolynomial;
    use crate::modsym::{build_space, cuspidal_subspace};

    fn cusp(n: u64) -> CuspidalSubspace {
        cuspidal_subspace(Arc::new(build_space(Level::new(n).unwrap())))
    }

    fn charpoly(p: u64, n: u64) -> QPolynomial {
        hecke_matrix(p, &cusp(n))
            .unwrap()
            .matrix
            .charpoly()
            .unwrap()
    }

    #[test]
    fn charpoly_fixtures() {
        assert_eq!(charpoly(2, 11), QPolynomial::from_i64(&[2, 1]).pow(2));
        assert_eq!(charpoly(3, 11), QPolynomial::from_i64(&[1, 1]).pow(2));
        assert_eq!(charpoly(2, 23), QPolynomial::from_i64(&[-1, 1, 1]).pow(2));
        assert_eq!(charpoly(11, 11), QPolynomial::from_i64(&[-1, 1]).pow(2));
    }

    #[test]
    fn merel_agrees_with_cremona() {
        for n in [11u64, 23, 37, 43] {
            let s = cusp(n);
            for p in [2u64, 3, 5, 7, 13] {
                let a = s.restrict(&s.space.action_matrix(&heilbronn_cremona(p)));
                let b = s.restrict(&s.space.action_matrix(&heilbronn_merel(p)));
                assert_eq!(a, b, "N={n} p={p}");
            }
        }
    }

    #[test]
    fn composite_operators() {
        let s = cusp(11);
        // a_4 = a_2^2 - 2 = 2 and a_6 = a_2 a_3 = 2 for the level-11 form
        assert_eq!(
            hecke_matrix_n(4, &s).unwrap().matrix,
            QMatrix::identity(2).scale(&rat(2))
        );
        assert_eq!(
            hecke_matrix_n(6, &s).unwrap().matrix,
            QMatrix::identity(2).scale(&rat(2))
        );
        assert!(hecke_matrix(4, &s).is_err());
    }

    #[test]
    fn commutativity() {
        let s = cusp(37);
        let ops: Vec<_> = [2, 3, 5]
            .iter()
            .map(|&p| hecke_matrix(p, &s).unwrap())
            .collect();
        assert!(verify_commutativity(&ops).unwrap());
        assert!(verify_commutativity(&ops[..1]).unwrap());
        let other = hecke_matrix(2, &cusp(11)).unwrap();
        assert!(verify_commutativity(&[ops[0].clone(), other]).is_err());
    }

    #[test]
    fn qexp_identity_and_truncation() {
        let f = QExpansion::from_i64(&[1, -2, -1, 2, 1, 2]);
        assert_eq!(hecke_qexp(1, &f).unwrap(), f);
        let t2 = hecke_qexp(2, &f).unwrap();
        assert_eq!(t2.truncation_order(), 3);
        assert_eq!(t2.coeff(2).as_rational(), Some(rat(4)));
        assert_eq!(t2.coeff(3).as_rational(), Some(rat(2)));
        assert!(matches!(
            hecke_qexp_to(2, &f, 4),
            Err(Error::Truncation { have: 6, need: 8 })
        ));
    }
}
