//! Number fields `K = Q[x]/(h)` in the power basis of `h`, and real
//! embeddings with exact sign determination.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, ToPrimitive, Zero};

use super::factor::is_irreducible;
use super::sturm::{isolate_real_roots, RootInterval, SturmSequence};
use super::{QPolynomial, Rational};
use crate::{Error, Result};

/// `Q[x]/(h)` with `h` monic irreducible.
#[derive(Debug, PartialEq, Eq, Hash)]
pub struct NumberField {
    minimal_polynomial: QPolynomial,
    degree: usize,
    totally_real: bool,
}

impl NumberField {
    /// Builds the field, checking that `h` is monic and irreducible over Q.
    pub fn new(h: QPolynomial) -> Result<Arc<Self>> {
        if !h.is_monic() || h.deg() == 0 {
            return Err(Error::Domain(format!(
                "minimal polynomial {h} must be monic of positive degree"
            )));
        }
        if !is_irreducible(&h) {
            return Err(Error::Domain(format!("{h} is reducible over Q")));
        }
        let degree = h.deg();
        let totally_real = SturmSequence::new(&h).count_real() == degree;
        Ok(Arc::new(Self {
            minimal_polynomial: h,
            degree,
            totally_real,
        }))
    }

    /// Q itself, presented as `Q[x]/(x)`.
    pub fn rationals() -> Arc<Self> {
        Arc::new(Self {
            minimal_polynomial: QPolynomial::x(),
            degree: 1,
            totally_real: true,
        })
    }

    pub fn minimal_polynomial(&self) -> &QPolynomial {
        &self.minimal_polynomial
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_totally_real(&self) -> bool {
        self.totally_real
    }

    pub fn is_rational(&self) -> bool {
        self.degree == 1
    }
}

/// True iff every root of the minimal polynomial is real.
pub fn nf_is_totally_real(k: &NumberField) -> bool {
    k.is_totally_real()
}

/// Element of a number field as coordinates in the power basis `1, a, ..., a^(d-1)`.
#[derive(Clone)]
pub struct NFElement {
    field: Arc<NumberField>,
    coords: Vec<Rational>,
}

impl PartialEq for NFElement {
    fn eq(&self, other: &Self) -> bool {
        same_field(&self.field, &other.field) && self.coords == other.coords
    }
}

impl Eq for NFElement {}

impl std::hash::Hash for NFElement {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.coords.hash(state);
    }
}

fn same_field(a: &Arc<NumberField>, b: &Arc<NumberField>) -> bool {
    Arc::ptr_eq(a, b) || a.minimal_polynomial == b.minimal_polynomial
}

impl NFElement {
    pub fn new(field: &Arc<NumberField>, mut coords: Vec<Rational>) -> Result<Self> {
        if coords.len() > field.degree {
            return Err(Error::Dimension(format!(
                "{} coordinates for a degree-{} field",
                coords.len(),
                field.degree
            )));
        }
        coords.resize(field.degree, Rational::zero());
        Ok(Self {
            field: field.clone(),
            coords,
        })
    }

    /// Reduces an arbitrary polynomial in the generator.
    pub fn from_poly(field: &Arc<NumberField>, p: &QPolynomial) -> Self {
        let r = p.rem(&field.minimal_polynomial).expect("nonzero modulus");
        let mut coords = r.coeffs().to_vec();
        coords.resize(field.degree, Rational::zero());
        Self {
            field: field.clone(),
            coords,
        }
    }

    pub fn from_rational(field: &Arc<NumberField>, q: Rational) -> Self {
        let mut coords = vec![Rational::zero(); field.degree];
        coords[0] = q;
        Self {
            field: field.clone(),
            coords,
        }
    }

    pub fn from_i64(field: &Arc<NumberField>, n: i64) -> Self {
        Self::from_rational(field, Rational::from_integer(n.into()))
    }

    pub fn zero(field: &Arc<NumberField>) -> Self {
        Self::from_rational(field, Rational::zero())
    }

    pub fn one(field: &Arc<NumberField>) -> Self {
        Self::from_rational(field, Rational::one())
    }

    /// The class of `x`, i.e. a root of the minimal polynomial.
    pub fn generator(field: &Arc<NumberField>) -> Self {
        Self::from_poly(field, &QPolynomial::x())
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn to_poly(&self) -> QPolynomial {
        QPolynomial::new(self.coords.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coords[0].is_one() && self.coords[1..].iter().all(|c| c.is_zero())
    }

    /// The rational value, if the element lies in Q.
    pub fn as_rational(&self) -> Option<Rational> {
        self.coords[1..]
            .iter()
            .all(|c| c.is_zero())
            .then(|| self.coords[0].clone())
    }

    pub fn scale(&self, q: &Rational) -> Self {
        Self {
            field: self.field.clone(),
            coords: self.coords.iter().map(|c| c * q).collect(),
        }
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Domain("inverse of zero".into()));
        }
        let (g, s, _) = self.to_poly().xgcd(&self.field.minimal_polynomial);
        debug_assert_eq!(g, QPolynomial::one());
        Ok(Self::from_poly(&self.field, &s))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.inverse()?)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(&self.field);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Minimal polynomial of the element over Q (monic).
    pub fn minimal_polynomial(&self) -> QPolynomial {
        let d = self.field.degree;
        let mut powers = vec![Self::one(&self.field)];
        for _ in 0..d {
            let next = powers.last().unwrap() * self;
            powers.push(next);
        }
        for k in 1..=d {
            // find relation among powers 0..=k
            let cols: Vec<Vec<Rational>> = powers[..=k].iter().map(|p| p.coords.clone()).collect();
            let m = super::QMatrix::from_columns(d, &cols);
            let ker = m.kernel();
            if ker.cols() > 0 {
                let v = ker.column(0);
                return QPolynomial::new(v).monic();
            }
        }
        unreachable!("degree bound on minimal polynomial")
    }

    /// Trace over Q.
    pub fn trace(&self) -> Rational {
        let mp = self.minimal_polynomial();
        let k = mp.deg();
        let reps = Rational::from_integer((self.field.degree / k).into());
        -mp.coeff(k - 1) * reps
    }

    /// Approximate value under an embedding given by a floating root.
    pub fn eval_f64(&self, root: f64) -> f64 {
        self.to_poly().eval_f64(root)
    }

    /// Formats as a polynomial in the given generator name.
    pub fn to_string_var(&self, var: &str) -> String {
        self.to_poly().to_string_var(var)
    }

    fn check(&self, other: &Self) {
        assert!(same_field(&self.field, &other.field), "mixed number fields");
    }
}

impl fmt::Display for NFElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_string_var("a"))
    }
}

impl fmt::Debug for NFElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "NFElement({} mod {})",
            self,
            self.field.minimal_polynomial.to_string_var("a")
        )
    }
}

impl<'a> Add<&'a NFElement> for &'a NFElement {
    type Output = NFElement;
    fn add(self, rhs: &NFElement) -> NFElement {
        self.check(rhs);
        NFElement {
            field: self.field.clone(),
            coords: self
                .coords
                .iter()
                .zip(&rhs.coords)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl<'a> Sub<&'a NFElement> for &'a NFElement {
    type Output = NFElement;
    fn sub(self, rhs: &NFElement) -> NFElement {
        self.check(rhs);
        NFElement {
            field: self.field.clone(),
            coords: self
                .coords
                .iter()
                .zip(&rhs.coords)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl<'a> Mul<&'a NFElement> for &'a NFElement {
    type Output = NFElement;
    fn mul(self, rhs: &NFElement) -> NFElement {
        self.check(rhs);
        if self.field.degree == 1 {
            return NFElement {
                field: self.field.clone(),
                coords: vec![&self.coords[0] * &rhs.coords[0]],
            };
        }
        NFElement::from_poly(&self.field, &(&self.to_poly() * &rhs.to_poly()))
    }
}

impl Neg for &NFElement {
    type Output = NFElement;
    fn neg(self) -> NFElement {
        NFElement {
            field: self.field.clone(),
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }
}

/// Solves `A x = b` exactly over a number field by Gaussian elimination.
pub fn nf_solve(a: &[Vec<NFElement>], b: &[NFElement]) -> Result<Vec<NFElement>> {
    let n = a.len();
    if b.len() != n || a.iter().any(|r| r.len() != n) {
        return Err(Error::Dimension("nf_solve expects a square system".into()));
    }
    if n == 0 {
        return Ok(vec![]);
    }
    let mut m: Vec<Vec<NFElement>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n)
            .find(|&i| !m[i][c].is_zero())
            .ok_or(Error::Singular)?;
        m.swap(c, p);
        let inv = m[c][c].inverse()?;
        for j in c..=n {
            m[c][j] = &m[c][j] * &inv;
        }
        for i in 0..n {
            if i == c || m[i][c].is_zero() {
                continue;
            }
            let f = m[i][c].clone();
            for j in c..=n {
                let v = &m[i][j] - &(&f * &m[c][j]);
                m[i][j] = v;
            }
        }
    }
    Ok(m.into_iter().map(|mut r| r.pop().unwrap()).collect())
}

/// Determinant over a number field by Gaussian elimination.
pub fn nf_determinant(a: &[Vec<NFElement>], field: &Arc<NumberField>) -> NFElement {
    let n = a.len();
    let mut m = a.to_vec();
    let mut det = NFElement::one(field);
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return NFElement::zero(field);
        };
        if p != c {
            m.swap(c, p);
            det = -&det;
        }
        det = &det * &m[c][c];
        let inv = m[c][c].inverse().expect("nonzero pivot");
        for i in c + 1..n {
            if m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] * &inv;
            for j in c..n {
                let v = &m[i][j] - &(&f * &m[c][j]);
                m[i][j] = v;
            }
        }
    }
    det
}

/// A real embedding of a number field: a designated real root of the
/// minimal polynomial, held as an isolating interval.
#[derive(Clone, Debug)]
pub struct RealEmbedding {
    field: Arc<NumberField>,
    index: usize,
    root: RootInterval,
    sturm: SturmSequence,
    approx: f64,
}

impl RealEmbedding {
    /// All real embeddings in increasing order of the root.
    pub fn all(field: &Arc<NumberField>) -> Vec<Self> {
        let sturm = SturmSequence::new(field.minimal_polynomial());
        isolate_real_roots(field.minimal_polynomial())
            .into_iter()
            .enumerate()
            .map(|(index, root)| {
                let mut e = Self {
                    field: field.clone(),
                    index,
                    root,
                    sturm: sturm.clone(),
                    approx: 0.0,
                };
                e.refine_to_bits(60);
                e
            })
            .collect()
    }

    /// Embedding at the `index`-th real root counted from the smallest.
    pub fn new(field: &Arc<NumberField>, index: usize) -> Result<Self> {
        Self::all(field)
            .into_iter()
            .nth(index)
            .ok_or_else(|| Error::Domain(format!("no real root with index {index}")))
    }

    /// Embedding at the largest real root.
    pub fn largest(field: &Arc<NumberField>) -> Result<Self> {
        Self::all(field)
            .pop()
            .ok_or_else(|| Error::Domain("field has no real embedding".into()))
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn root_interval(&self) -> &RootInterval {
        &self.root
    }

    pub fn root_f64(&self) -> f64 {
        self.approx
    }

    /// Narrows the isolating interval to width at most `2^-bits`.
    pub fn refine_to_bits(&mut self, bits: u32) {
        let target = Rational::new(1.into(), num_bigint::BigInt::one() << bits);
        let poly = self.field.minimal_polynomial();
        if poly.deg() == 1 {
            let r = -poly.coeff(0) / poly.coeff(1);
            self.root.lo = r.clone();
            self.root.hi = r;
        } else if self.root.is_exact(&self.sturm) {
            self.root.lo = self.root.hi.clone();
        } else {
            while self.root.width() > target {
                self.root.bisect(&self.sturm);
            }
        }
        self.approx = self.root.midpoint().to_f64().unwrap_or(f64::NAN);
    }

    /// Rational approximation of the root with error at most `2^-bits`.
    pub fn root_approx(&self, bits: u32) -> Rational {
        let mut e = self.clone();
        e.refine_to_bits(bits);
        e.root.midpoint()
    }

    /// Approximate value of an element under this embedding.
    pub fn to_f64(&self, x: &NFElement) -> f64 {
        x.eval_f64(self.approx)
    }

    /// Exact sign of `x` under this embedding.
    pub fn sign(&self, x: &NFElement) -> Ordering {
        if x.is_zero() {
            return Ordering::Equal;
        }
        if let Some(q) = x.as_rational() {
            return q.cmp(&Rational::zero());
        }
        if self.field.degree == 1 {
            return x.coords[0].cmp(&Rational::zero());
        }
        // floating filter with a generous error bound
        let r = self.approx;
        let v = x.eval_f64(r);
        let mag: f64 = x
            .coords
            .iter()
            .enumerate()
            .map(|(i, c)| {
                c.to_f64().unwrap_or(f64::INFINITY).abs() * r.abs().max(1.0).powi(i as i32)
            })
            .sum();
        if v.is_finite() && v.abs() > 1e-9 * mag.max(f64::MIN_POSITIVE) {
            return if v > 0.0 {
                Ordering::Greater
            } else {
                Ordering::Less
            };
        }
        self.exact_sign(x)
    }

    fn exact_sign(&self, x: &NFElement) -> Ordering {
        // x(root) != 0 since x is nonzero and the minimal polynomial is irreducible
        let poly = x.to_poly();
        let seq = SturmSequence::new(&poly);
        let mut iv = self.root.clone();
        loop {
            if seq.count_in(&iv.lo, &iv.hi) == 0 {
                let v = poly.eval(&iv.hi);
                if !v.is_zero() {
                    return v.cmp(&Rational::zero());
                }
            }
            iv.bisect(&self.sturm);
        }
    }

    /// Exact comparison of two elements under this embedding.
    pub fn cmp(&self, a: &NFElement, b: &NFElement) -> Ordering {
        self.sign(&(a - b))
    }

    pub fn is_positive(&self, x: &NFElement) -> bool {
        self.sign(x) == Ordering::Greater
    }
}
