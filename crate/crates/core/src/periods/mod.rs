//! Numeric periods of eigenforms over cuspidal homology and integer-relation
//! detection of the rank of the Z-module they generate.
//!
//! For `γ = [[a, b], [c, d]]` in Γ₀(N) the cycle `{z₀, γz₀}` is integrated
//! from the balanced base point `z₀ = (−d + i)/c`, so that `γz₀ = (a + i)/c`
//! and both endpoints have imaginary part `1/c`. The antiderivative of
//! `2πi f(z) dz` is `Σ c_n/n · e^{2πinz}`.

pub mod bigfloat;
pub mod lll;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

pub use bigfloat::{BigFloat, Complex};

use crate::algebra::{NFElement, QMatrix, Rational};
use crate::congruence::{gamma0_contains, gcd, primes, xgcd, Mat2};
use crate::eigen::{apply_rational, EigenformOrbit};
use crate::hecke::{hecke_image_counts, hecke_matrix_ambient, QExpansion};
use crate::modsym::{CuspidalSubspace, ModSymSpace};
use crate::{Error, Result};

/// Guard digits carried beyond the requested precision.
const GUARD: u32 = 10;

/// Series length for a path with lower-left entry `c` at `digits` digits.
pub fn required_terms(c: i64, digits: u32) -> usize {
    let t = c.unsigned_abs() as f64 * digits as f64 * std::f64::consts::LN_10
        / (2.0 * std::f64::consts::PI);
    t.ceil() as usize + 50
}

/// Values `φ(x)` of the star-invariant Hecke-eigen functional `φ` on every
/// Manin symbol, indexed by P¹ position. `φ ∘ T_p = c_p φ` on the full
/// modular-symbols space.
pub fn dual_functional(orbit: &EigenformOrbit, space: &ModSymSpace) -> Result<Vec<NFElement>> {
    let field = &orbit.field;
    let st = space.star_matrix().transpose();
    let plus = (&st - &QMatrix::identity(st.rows())).kernel();
    let k = plus.cols();
    let mut rows: Vec<Vec<NFElement>> = Vec::new();
    for (&p, c) in &orbit.coefficient_map {
        let at = hecke_matrix_ambient(p, space)?.transpose();
        let r = plus.coordinates_in_span(&(&at * &plus))?;
        for i in 0..k {
            rows.push(
                (0..k)
                    .map(|j| {
                        let x = NFElement::from_rational(field, r[(i, j)].clone());
                        if i == j {
                            &x - c
                        } else {
                            x
                        }
                    })
                    .collect(),
            );
        }
    }
    let kernel = nf_kernel(&rows, field, k);
    if kernel.len() != 1 {
        return Err(Error::Multiplicity {
            rank: k - kernel.len(),
            expected: k.saturating_sub(1),
        });
    }
    let phi = apply_rational(&plus, &kernel[0]);
    Ok((0..space.p1().len())
        .map(|i| {
            space
                .symbol_coords(i)
                .iter()
                .fold(NFElement::zero(field), |acc, (j, v)| {
                    &acc + &phi[*j].scale(v)
                })
        })
        .collect())
}

fn nf_kernel(
    a: &[Vec<NFElement>],
    field: &std::sync::Arc<crate::algebra::NumberField>,
    cols: usize,
) -> Vec<Vec<NFElement>> {
    let mut m = a.to_vec();
    let rows = m.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].inverse().expect("nonzero pivot");
        for j in c..cols {
            m[r][j] = &m[r][j] * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..cols {
                    let v = &m[i][j] - &(&f * &m[r][j]);
                    m[i][j] = v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|f| {
            let mut v = vec![NFElement::zero(field); cols];
            v[f] = NFElement::one(field);
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -&m[row][f];
            }
            v
        })
        .collect()
}

/// Hecke eigenvalues `c_p` for all primes `p <= bound`, read off the dual
/// functional: `c_p = φ(T_p x) / φ(x)` for a symbol `x` with `φ(x) ≠ 0`.
pub fn prime_coefficients(
    orbit: &EigenformOrbit,
    space: &ModSymSpace,
    bound: u64,
) -> Result<BTreeMap<u64, NFElement>> {
    let psi = dual_functional(orbit, space)?;
    let e = psi
        .iter()
        .position(|x| !x.is_zero())
        .ok_or(Error::Domain("vanishing functional".into()))?;
    let inv = psi[e].inverse()?;
    let mut out = BTreeMap::new();
    for p in primes().take_while(|&p| p <= bound) {
        let sum = hecke_image_counts(p, e, space)
            .into_iter()
            .fold(NFElement::zero(&orbit.field), |acc, (k, n)| {
                &acc + &psi[k].scale(&Rational::from_integer(n.into()))
            });
        out.insert(p, &sum * &inv);
    }
    Ok(out)
}

/// Exact q-expansion of the normalized eigenform to the given order.
pub fn eigenform_expansion(
    orbit: &EigenformOrbit,
    space: &ModSymSpace,
    order: usize,
) -> Result<QExpansion> {
    let ap = prime_coefficients(orbit, space, order as u64)?;
    QExpansion::from_prime_coefficients(orbit.level, &orbit.field, order, |p| {
        ap.get(&p)
            .cloned()
            .ok_or(Error::Domain(format!("missing c_{p}")))
    })
}

/// An eigenform with its coefficients `c_n / n` embedded as reals.
#[derive(Clone, Debug)]
pub struct NumericEigenform {
    pub level: crate::congruence::Level,
    pub orbit_index: usize,
    pub digits: u32,
    pub expansion: QExpansion,
    powers: Vec<BigFloat>,
    scaled: Vec<BigFloat>,
}

impl NumericEigenform {
    pub fn new(
        orbit: &EigenformOrbit,
        orbit_index: usize,
        space: &ModSymSpace,
        order: usize,
        digits: u32,
    ) -> Result<Self> {
        let expansion = eigenform_expansion(orbit, space, order)?;
        let work = digits + GUARD;
        let mut emb = orbit.embedding.clone();
        let bits = bigfloat::bits_for_digits(work) as u32 + 16;
        emb.refine_to_bits(bits);
        let root = BigFloat::from_rational(&emb.root_approx(bits), work);
        let mut powers = vec![BigFloat::from_i64(1, work)];
        for _ in 1..orbit.field.degree() {
            let next = &powers[powers.len() - 1] * &root;
            powers.push(next);
        }
        let mut out = Self {
            level: orbit.level,
            orbit_index,
            digits,
            expansion,
            powers,
            scaled: Vec::new(),
        };
        out.scaled = out
            .expansion
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, c)| out.embed(c).div_i64(i as i64 + 1))
            .collect();
        Ok(out)
    }

    /// Image of a field element under the orbit's real embedding.
    pub fn embed(&self, x: &NFElement) -> BigFloat {
        let work = self.working_digits();
        x.coords()
            .iter()
            .zip(&self.powers)
            .fold(BigFloat::zero(work), |acc, (q, r)| {
                if q.is_zero() {
                    acc
                } else {
                    &acc + &(&BigFloat::from_rational(q, work) * r)
                }
            })
    }

    pub fn order(&self) -> usize {
        self.scaled.len()
    }

    fn working_digits(&self) -> u32 {
        self.digits + GUARD
    }

    /// `Σ_{n<=terms} c_n/n · e^{2πinz}` at `z = x + iy`.
    pub fn antiderivative(&self, x: &BigFloat, y: &BigFloat, terms: usize) -> Complex {
        let w = Complex::exp_2pi_i(x, y);
        let mut power = w.clone();
        let mut acc = Complex::zero(self.working_digits());
        for c in &self.scaled[..terms] {
            acc = acc.add(&power.scale(c));
            power = power.mul(&w);
        }
        acc
    }
}

/// A period with a bound on the series truncation error.
#[derive(Clone, Debug)]
pub struct PeriodIntegral {
    pub value: Complex,
    pub terms: usize,
    /// `log10` of the bound on the neglected tails of both halves.
    pub error_log10: f64,
}

fn tail_bound_log10(c: i64, terms: usize) -> f64 {
    // |c_n|/n <= 2 by Deligne's bound; two tails of a geometric series
    let r_log10 = -2.0 * std::f64::consts::PI / c.unsigned_abs() as f64 * std::f64::consts::LOG10_E;
    let r = 10f64.powf(r_log10);
    4f64.log10() + (terms as f64 + 1.0) * r_log10 - (1.0 - r).log10()
}

/// `∫_{z₀}^{γz₀} 2πi f(z) dz` with `z₀ = (−d + i)/c`.
pub fn period_integral(
    f: &NumericEigenform,
    gamma: &Mat2,
    terms: usize,
    digits: u32,
) -> Result<PeriodIntegral> {
    if !gamma0_contains(gamma, f.level) {
        return Err(Error::Domain(format!(
            "{gamma:?} is not in Γ₀({})",
            f.level
        )));
    }
    let sign = if gamma[1][0] < 0 { -1 } else { 1 };
    let [[a, _], [c, d]] = gamma.map(|r| r.map(|x| x * sign));
    if c == 0 {
        return Err(Error::DegeneratePath);
    }
    let need = required_terms(c, digits);
    if terms < need {
        return Err(Error::Precision(format!(
            "{digits} digits along a path with c = {c} need {need} terms, got {terms}"
        )));
    }
    if terms > f.order() {
        return Err(Error::Truncation {
            have: f.order(),
            need: terms,
        });
    }
    let w = f.working_digits();
    let y = BigFloat::from_rational(&Rational::new(1.into(), c.into()), w);
    let x0 = BigFloat::from_rational(&Rational::new((-d).into(), c.into()), w);
    let x1 = BigFloat::from_rational(&Rational::new(a.into(), c.into()), w);
    let value = f
        .antiderivative(&x1, &y, terms)
        .sub(&f.antiderivative(&x0, &y, terms));
    Ok(PeriodIntegral {
        value,
        terms,
        error_log10: tail_bound_log10(c, terms),
    })
}

/// `∫_{z₀}^{z₁} 2πi f(z) dz` between two points of the upper half plane.
pub fn integral_between(
    f: &NumericEigenform,
    z0: (&BigFloat, &BigFloat),
    z1: (&BigFloat, &BigFloat),
    terms: usize,
) -> Result<Complex> {
    if terms > f.order() {
        return Err(Error::Truncation {
            have: f.order(),
            need: terms,
        });
    }
    Ok(f.antiderivative(z1.0, z1.1, terms)
        .sub(&f.antiderivative(z0.0, z0.1, terms)))
}

/// Elements `γ ∈ Γ₀(N)` whose cycles `{∞, γ∞}` span the cuspidal homology,
/// taken with `c = N, 2N, …` and increasing `a`.
#[derive(Clone, Debug)]
pub struct HomologyBasis {
    pub gammas: Vec<Mat2>,
    /// Cuspidal coordinates of each cycle, one column each.
    pub coordinates: QMatrix,
}

pub fn homology_generators(s: &CuspidalSubspace) -> HomologyBasis {
    let n = s.level().get() as i64;
    let dim = s.dimension();
    let mut gammas = Vec::new();
    let mut cols: Vec<Vec<Rational>> = Vec::new();
    let mut k = 1;
    while cols.len() < dim {
        let c = n * k;
        for a in 1..c {
            if cols.len() == dim {
                break;
            }
            if gcd(a, c) != 1 {
                continue;
            }
            let d = xgcd(a, c).1.rem_euclid(c);
            let b = (a * d - 1) / c;
            let v = s
                .coordinates(&s.space.infinity_to(a, c))
                .expect("Γ₀(N) cycles are cuspidal");
            let mut trial = cols.clone();
            trial.push(v);
            if QMatrix::from_columns(dim, &trial).rank() == trial.len() {
                cols = trial;
                gammas.push([[a, b], [c, d]]);
            }
        }
        k += 1;
    }
    HomologyBasis {
        gammas,
        coordinates: QMatrix::from_columns(dim, &cols),
    }
}

/// Real parts of the periods over a homology basis.
#[derive(Clone, Debug)]
pub struct PeriodVector {
    pub level: crate::congruence::Level,
    pub orbit: usize,
    pub values: Vec<BigFloat>,
    pub imaginary: Vec<BigFloat>,
    pub error_log10: Vec<f64>,
    /// Digits believed correct in every entry.
    pub precision_estimate: u32,
}

/// Series order needed to integrate over every element of a basis.
pub fn order_for(basis: &[Mat2], digits: u32) -> usize {
    basis
        .iter()
        .map(|g| required_terms(g[1][0], digits))
        .max()
        .unwrap_or(0)
}

pub fn numeric_jacobian(f: &NumericEigenform, basis: &[Mat2], digits: u32) -> Result<PeriodVector> {
    let mut values = Vec::new();
    let mut imaginary = Vec::new();
    let mut errs = Vec::new();
    for g in basis {
        let p = period_integral(f, g, required_terms(g[1][0], digits), digits)?;
        values.push(p.value.re);
        imaginary.push(p.value.im);
        errs.push(p.error_log10);
    }
    let worst = errs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let precision_estimate = ((-worst).floor().max(0.0) as u32).min(digits);
    Ok(PeriodVector {
        level: f.level,
        orbit: f.orbit_index,
        values,
        imaginary,
        error_log10: errs,
        precision_estimate,
    })
}

/// Outcome of integer-relation based rank detection.
#[derive(Clone, Debug)]
pub struct RankReport {
    pub rank: usize,
    /// Accepted integer relations `Σ m_i v_i ≈ 0`.
    pub relations: Vec<Vec<BigInt>>,
    /// Largest `log10 |Σ m_i v_i|` over accepted relations.
    pub max_residual_log10: f64,
}

/// Rank of the Z-module generated by `values`. The lattice `[I | 10^D v]`
/// is LLL-reduced; a reduced row `m` is a relation when its quality
/// `|Σ m v| / max|v| · ‖m‖∞^{n−1}` is below `10^{−D/2}`, and a non-relation
/// above `10^{−D/4}`. Anything between is indeterminate.
pub fn detect_rank(values: &[BigFloat], digits: u32) -> Result<RankReport> {
    if digits < 40 {
        return Err(Error::Domain(format!(
            "rank detection needs at least 40 digits, got {digits}"
        )));
    }
    let n = values.len();
    let vmax = values
        .iter()
        .map(BigFloat::log10_abs)
        .fold(f64::NEG_INFINITY, f64::max);
    if n == 0 || vmax < -(digits as f64) {
        return Ok(RankReport {
            rank: 0,
            relations: vec![],
            max_residual_log10: f64::NEG_INFINITY,
        });
    }
    let scale = BigFloat::from_bigint(&BigInt::from(10).pow(digits), digits + GUARD);
    let rows: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            let mut r = vec![BigInt::zero(); n + 1];
            r[i] = BigInt::from(1);
            r[n] = (&values[i] * &scale).round_to_bigint();
            r
        })
        .collect();
    let reduced = lll::lll(rows);
    let accept = -(digits as f64) / 2.0;
    let reject = -(digits as f64) / 4.0;
    let mut relations = Vec::new();
    let mut max_residual = f64::NEG_INFINITY;
    for row in reduced {
        let m = &row[..n];
        let residual = m
            .iter()
            .zip(values)
            .fold(BigFloat::zero(digits + GUARD), |acc, (mi, v)| {
                &acc + &(v * &BigFloat::from_bigint(mi, digits + GUARD))
            });
        let r = residual.log10_abs();
        let mmax = m.iter().map(|x| x.abs()).max().expect("n >= 1");
        let mlog = BigFloat::from_bigint(&mmax, 20).log10_abs();
        let quality = r - vmax + (n as f64 - 1.0) * mlog;
        if quality < accept {
            max_residual = max_residual.max(r);
            relations.push(m.to_vec());
        } else if quality <= reject {
            return Err(Error::Indeterminate {
                residual_log10: quality,
            });
        }
    }
    Ok(RankReport {
        rank: n - relations.len(),
        relations,
        max_residual_log10: max_residual,
    })
}


#[cfg(test)]
mod jacobian_tests {
    use super::*;
    use crate::congruence::Level;
    use crate::modsym::{build_space, cuspidal_subspace};
    use std::sync::Arc;

    fn ranks(n: u64, digits: u32) -> Vec<(usize, usize, f64)> {
        let s = cuspidal_subspace(Arc::new(build_space(Level::new(n).unwrap())));
        let orbits = crate::eigen::decompose_auto(&s).unwrap();
        let basis = homology_generators(&s);
        let order = order_for(&basis.gammas, digits);
        orbits
            .iter()
            .enumerate()
            .map(|(i, o)| {
                let f = NumericEigenform::new(o, i, &s.space, order, digits).unwrap();
                let pv = numeric_jacobian(&f, &basis.gammas, digits).unwrap();
                assert_eq!(pv.values.len(), s.dimension());
                let r = detect_rank(&pv.values, digits).unwrap();
                (o.degree, r.rank, r.max_residual_log10)
            })
            .collect()
    }

    #[test]
    fn ranks_equal_degrees() {
        for n in [11, 23, 37] {
            for (deg, rank, res) in ranks(n, 60) {
                assert_eq!(deg, rank, "level {n}");
                assert!(res < -30.0, "level {n} residual {res}");
            }
        }
    }

    #[test]
    fn periods_are_hecke_equivariant() {
        let digits = 40;
        let s = cuspidal_subspace(Arc::new(build_space(Level::new(23).unwrap())));
        let orbits = crate::eigen::decompose_auto(&s).unwrap();
        let basis = homology_generators(&s);
        let order = order_for(&basis.gammas, digits);
        let f = NumericEigenform::new(&orbits[0], 0, &s.space, order, digits).unwrap();
        let pv = numeric_jacobian(&f, &basis.gammas, digits).unwrap();
        let x = &basis.coordinates;
        for p in [2u64, 3, 5] {
            let t = crate::hecke::hecke_matrix(p, &s).unwrap().matrix;
            let tx = &t * x;
            let m = (&x.inverse().unwrap() * &tx).transpose();
            let a = f.embed(f.expansion.coeff(p as usize));
            for part in [&pv.values, &pv.imaginary] {
                for i in 0..m.rows() {
                    let lhs = (0..m.cols()).fold(BigFloat::zero(digits), |acc, j| {
                        &acc + &(&part[j] * &BigFloat::from_rational(&m[(i, j)], digits))
                    });
                    assert!((&lhs - &(&a * &part[i])).log10_abs() < -35.0, "p = {p}");
                }
            }
        }
    }

    #[test]
    fn cocycle_and_truncation_stability() {
        let digits = 30;
        let s = cuspidal_subspace(Arc::new(build_space(Level::new(11).unwrap())));
        let orbits = crate::eigen::decompose_auto(&s).unwrap();
        let g1: Mat2 = [[1, 0], [11, 1]];
        let g2: Mat2 = [[2, 1], [11, 6]];
        let g12 = [
            [
                g1[0][0] * g2[0][0] + g1[0][1] * g2[1][0],
                g1[0][0] * g2[0][1] + g1[0][1] * g2[1][1],
            ],
            [
                g1[1][0] * g2[0][0] + g1[1][1] * g2[1][0],
                g1[1][0] * g2[0][1] + g1[1][1] * g2[1][1],
            ],
        ];
        let need = required_terms(g12[1][0], digits);
        let f = NumericEigenform::new(&orbits[0], 0, &s.space, 2 * need, digits).unwrap();
        let p = |g: &Mat2, t: usize| period_integral(&f, g, t, digits).unwrap().value;
        let sum = p(&g1, need).add(&p(&g2, need));
        let diff = sum.sub(&p(&g12, need));
        assert!(diff.norm_sqr().log10_abs() < -2.0 * (digits as f64 - 2.0));
        let d = p(&g1, need).sub(&p(&g1, 2 * need));
        assert!(d.norm_sqr().log10_abs() < -2.0 * (digits as f64 - 2.0));
    }
}
