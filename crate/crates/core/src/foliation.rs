//! Jacobian Z-modules of measured foliations, their rank, and the
//! Strebel / pseudo-Anosov / degenerate pseudo-Anosov classification.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::algebra::{
    common_denominator, NFElement, NumberField, QMatrix, QPolynomial, Rational, RealEmbedding,
};
use crate::congruence::CurveData;
use crate::eigen::EigenformOrbit;
use crate::{Error, Result};

/// The Z-module `Zλ₁ + … + Zλ_n` inside a real number field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JacobianModule {
    field: Arc<NumberField>,
    generators: Vec<NFElement>,
}

impl JacobianModule {
    pub fn new(field: &Arc<NumberField>, generators: Vec<NFElement>) -> Result<Self> {
        if generators
            .iter()
            .any(|g| !Arc::ptr_eq(g.field(), field) && g.field() != field)
        {
            return Err(Error::Domain("generators live in a different field".into()));
        }
        Ok(Self {
            field: field.clone(),
            generators,
        })
    }

    /// Module spanned by the rescaled eigenvector entries of an orbit.
    pub fn of_orbit(orbit: &EigenformOrbit) -> Self {
        Self {
            field: orbit.field.clone(),
            generators: orbit.eigenvector.clone(),
        }
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn generators(&self) -> &[NFElement] {
        &self.generators
    }

    /// Power-basis coordinates of the generators, one row each.
    pub fn coordinate_matrix(&self) -> QMatrix {
        let d = self.field.degree();
        let mut m = QMatrix::zeros(self.generators.len(), d);
        for (i, g) in self.generators.iter().enumerate() {
            for (j, c) in g.coords().iter().enumerate() {
                m[(i, j)] = c.clone();
            }
        }
        m
    }

    /// Canonical form of the generated lattice: the Hermite normal form of
    /// the denominator-cleared coordinates, divided back by the denominator.
    pub fn canonical_lattice(&self) -> Vec<Vec<Rational>> {
        let m = self.coordinate_matrix();
        let den = common_denominator(m.entries().iter());
        let rows: Vec<Vec<BigInt>> = (0..m.rows())
            .map(|i| {
                m.row(i)
                    .iter()
                    .map(|x| (x * Rational::from_integer(den.clone())).to_integer())
                    .collect()
            })
            .collect();
        hermite_normal_form(rows)
            .into_iter()
            .map(|r| {
                r.into_iter()
                    .map(|x| Rational::new(x, den.clone()))
                    .collect()
            })
            .collect()
    }
}

/// Row-style Hermite normal form: nonzero rows, positive pivots, entries
/// above each pivot reduced into `[0, pivot)`.
pub fn hermite_normal_form(mut a: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        // Euclid on column c among rows r..
        loop {
            let Some(p) = (r..rows)
                .filter(|&i| !a[i][c].is_zero())
                .min_by(|&i, &j| a[i][c].abs().cmp(&a[j][c].abs()))
            else {
                break;
            };
            a.swap(r, p);
            let mut done = true;
            for i in r + 1..rows {
                if a[i][c].is_zero() {
                    continue;
                }
                let q = a[i][c].div_floor(&a[r][c]);
                for j in c..cols {
                    let v = &a[i][j] - &q * &a[r][j];
                    a[i][j] = v;
                }
                if !a[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if a[r][c].is_zero() {
            continue;
        }
        if a[r][c].is_negative() {
            for j in c..cols {
                a[r][j] = -&a[r][j];
            }
        }
        for i in 0..r {
            let q = a[i][c].div_floor(&a[r][c]);
            if q.is_zero() {
                continue;
            }
            for j in c..cols {
                let v = &a[i][j] - &q * &a[r][j];
                a[i][j] = v;
            }
        }
        r += 1;
    }
    a.truncate(r);
    a
}

/// Rank of the Z-module: the Q-rank of the coordinate matrix, since the
/// power basis is Q-linearly independent inside R.
pub fn module_rank(j: &JacobianModule) -> usize {
    j.coordinate_matrix().rank()
}

/// New generators `λ' = A λ` for a unimodular integer matrix `A`.
pub fn basis_change(j: &JacobianModule, a: &[Vec<i64>]) -> Result<JacobianModule> {
    let n = j.generators.len();
    if a.len() != n || a.iter().any(|r| r.len() != n) {
        return Err(Error::Dimension(format!(
            "basis change needs a {n}x{n} matrix"
        )));
    }
    let q = QMatrix::from_rows(
        a.iter()
            .map(|r| {
                r.iter()
                    .map(|&x| Rational::from_integer(x.into()))
                    .collect()
            })
            .collect(),
    )?;
    let det = q.determinant()?;
    if det.abs() != Rational::one() {
        return Err(Error::Domain(format!(
            "basis change matrix has determinant {det}, not ±1"
        )));
    }
    let generators = a
        .iter()
        .map(|row| {
            row.iter()
                .zip(&j.generators)
                .fold(NFElement::zero(&j.field), |acc, (&c, g)| {
                    &acc + &g.scale(&Rational::from_integer(c.into()))
                })
        })
        .collect();
    Ok(JacobianModule {
        field: j.field.clone(),
        generators,
    })
}

/// Multiplies every generator by a nonzero `μ`.
pub fn scale_module(j: &JacobianModule, mu: &NFElement) -> Result<JacobianModule> {
    if mu.is_zero() {
        return Err(Error::Domain("scaling by zero".into()));
    }
    Ok(JacobianModule {
        field: j.field.clone(),
        generators: j.generators.iter().map(|g| g * mu).collect(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FoliationKind {
    Strebel,
    PseudoAnosov,
    DegeneratePseudoAnosov,
}

impl FoliationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Strebel => "strebel",
            Self::PseudoAnosov => "pseudo_anosov",
            Self::DegeneratePseudoAnosov => "degenerate_pseudo_anosov",
        }
    }
}

impl fmt::Display for FoliationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FoliationClass {
    pub kind: FoliationKind,
    pub degree: usize,
    pub genus: u64,
    /// `g − deg` extra separatrix connections, for the degenerate case.
    pub separatrix_excess: Option<u64>,
}

/// Classification by the degree of the eigenvalue field. Degree 1 wins
/// over degree `g` when `g = 1`.
pub fn classify_degree(degree: usize, genus: u64) -> Result<FoliationClass> {
    if genus == 0 {
        return Err(Error::NoCuspForms(0));
    }
    let d = degree as u64;
    if d == 0 || d > genus {
        return Err(Error::Domain(format!(
            "field degree {degree} outside 1..={genus}"
        )));
    }
    let (kind, separatrix_excess) = if d == 1 {
        (FoliationKind::Strebel, None)
    } else if d == genus {
        (FoliationKind::PseudoAnosov, None)
    } else {
        (FoliationKind::DegeneratePseudoAnosov, Some(genus - d))
    };
    Ok(FoliationClass {
        kind,
        degree,
        genus,
        separatrix_excess,
    })
}

pub fn classify(orbit: &EigenformOrbit, curve: &CurveData) -> Result<FoliationClass> {
    if orbit.level != curve.level {
        return Err(Error::Domain(format!(
            "orbit at level {} with curve data for level {}",
            orbit.level, curve.level
        )));
    }
    if curve.genus == 0 {
        return Err(Error::NoCuspForms(curve.level.get()));
    }
    classify_degree(orbit.degree, curve.genus)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TorusKind {
    FiniteOrder,
    ParabolicStrebel,
    Anosov,
}

impl TorusKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::FiniteOrder => "finite_order",
            Self::ParabolicStrebel => "parabolic_strebel",
            Self::Anosov => "anosov",
        }
    }
}

#[derive(Clone, Debug)]
pub struct TorusClass {
    pub kind: TorusKind,
    pub trace: i64,
    /// Spectral radius `λ_A > 1`: the larger root of `x² − |tr| x + 1`,
    /// with the embedding that selects it.
    pub dilatation: Option<(NFElement, RealEmbedding)>,
}

/// Trichotomy for an orientation-preserving automorphism of the torus.
pub fn classify_torus(a: &[[i64; 2]; 2]) -> Result<TorusClass> {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    if det != 1 {
        return Err(Error::Domain(format!(
            "determinant is {det}; only det 1 preserves orientation"
        )));
    }
    let trace = a[0][0] + a[1][1];
    // ±I has trace ±2 but is not a twist
    let scalar = a[0][1] == 0 && a[1][0] == 0 && a[0][0] == a[1][1];
    let (kind, dilatation) = match trace.abs() {
        _ if scalar => (TorusKind::FiniteOrder, None),
        0 | 1 => (TorusKind::FiniteOrder, None),
        2 => (TorusKind::ParabolicStrebel, None),
        t => {
            let field = NumberField::new(QPolynomial::from_i64(&[1, -t, 1]))?;
            let emb = RealEmbedding::largest(&field)?;
            (TorusKind::Anosov, Some((NFElement::generator(&field), emb)))
        }
    };
    Ok(TorusClass {
        kind,
        trace,
        dilatation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, ratio};

    fn golden() -> Arc<NumberField> {
        NumberField::new(QPolynomial::from_i64(&[-1, -1, 1])).unwrap()
    }

    fn q_module(xs: &[Rational]) -> JacobianModule {
        let q = NumberField::rationals();
        JacobianModule::new(
            &q,
            xs.iter()
                .map(|x| NFElement::from_rational(&q, x.clone()))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn rank_fixtures() {
        assert_eq!(
            module_rank(&q_module(&[rat(1), ratio(1, 2), ratio(1, 3)])),
            1
        );
        let k = golden();
        let phi = NFElement::generator(&k);
        let j =
            JacobianModule::new(&k, vec![NFElement::one(&k), &phi - &NFElement::one(&k)]).unwrap();
        assert_eq!(module_rank(&j), 2);
        assert_eq!(
            module_rank(&JacobianModule::new(&k, vec![NFElement::zero(&k)]).unwrap()),
            0
        );
    }

    #[test]
    fn basis_change_fixtures() {
        let k = golden();
        let one = NFElement::one(&k);
        let phi = NFElement::generator(&k);
        let j = JacobianModule::new(&k, vec![one.clone(), &phi - &one]).unwrap();
        let j2 = basis_change(&j, &[vec![1, 1], vec![0, 1]]).unwrap();
        assert_eq!(j2.generators(), &[phi.clone(), &phi - &one]);
        assert_eq!(j2.canonical_lattice(), j.canonical_lattice());
        assert_eq!(basis_change(&j, &[vec![1, 0], vec![0, 1]]).unwrap(), j);

        let h = q_module(&[rat(1), ratio(1, 2)]);
        let h2 = basis_change(&h, &[vec![2, 1], vec![1, 1]]).unwrap();
        assert_eq!(h2, q_module(&[ratio(5, 2), ratio(3, 2)]));
        assert_eq!(h2.canonical_lattice(), vec![vec![ratio(1, 2)]]);
        assert!(basis_change(&h, &[vec![2, 0], vec![0, 1]]).is_err());
    }

    #[test]
    fn scaling() {
        let h = q_module(&[rat(1), ratio(1, 2)]);
        let q = h.field().clone();
        let s = scale_module(&h, &NFElement::from_rational(&q, ratio(1, 3))).unwrap();
        assert_eq!(s, q_module(&[ratio(1, 3), ratio(1, 6)]));
        assert_eq!(module_rank(&s), 1);
        assert!(scale_module(&h, &NFElement::zero(&q)).is_err());
    }

    #[test]
    fn hnf_is_canonical() {
        let a = vec![
            vec![BigInt::from(4), BigInt::from(6)],
            vec![BigInt::from(2), BigInt::from(2)],
        ];
        let b = vec![
            vec![BigInt::from(2), BigInt::from(2)],
            vec![BigInt::from(0), BigInt::from(2)],
        ];
        assert_eq!(hermite_normal_form(a), hermite_normal_form(b));
    }

    #[test]
    fn degree_trichotomy() {
        assert_eq!(classify_degree(1, 1).unwrap().kind, FoliationKind::Strebel);
        assert_eq!(
            classify_degree(2, 2).unwrap().kind,
            FoliationKind::PseudoAnosov
        );
        assert_eq!(classify_degree(1, 2).unwrap().kind, FoliationKind::Strebel);
        let c = classify_degree(2, 5).unwrap();
        assert_eq!(c.kind, FoliationKind::DegeneratePseudoAnosov);
        assert_eq!(c.separatrix_excess, Some(3));
        assert!(classify_degree(1, 0).is_err());
    }

    #[test]
    fn torus_fixtures() {
        assert_eq!(
            classify_torus(&[[1, 1], [0, 1]]).unwrap().kind,
            TorusKind::ParabolicStrebel
        );
        assert_eq!(
            classify_torus(&[[0, -1], [1, 0]]).unwrap().kind,
            TorusKind::FiniteOrder
        );
        let t = classify_torus(&[[2, 1], [1, 1]]).unwrap();
        assert_eq!(t.kind, TorusKind::Anosov);
        let (lam, emb) = t.dilatation.unwrap();
        assert!((emb.to_f64(&lam) - (3.0 + 5f64.sqrt()) / 2.0).abs() < 1e-12);
        assert!(classify_torus(&[[2, 0], [0, 1]]).is_err());
        assert_eq!(
            classify_torus(&[[-1, 0], [0, -1]]).unwrap().kind,
            TorusKind::FiniteOrder
        );
    }
}
