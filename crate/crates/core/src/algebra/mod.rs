//! Exact arithmetic over Q and over number fields given by a power basis.

pub mod factor;
pub mod matrix;
mod modp;
pub mod numfield;
pub mod poly;
pub mod sturm;

pub use factor::factor_poly;
pub use matrix::QMatrix;
pub use numfield::{nf_is_totally_real, nf_solve, NFElement, NumberField, RealEmbedding};
pub use poly::QPolynomial;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Arbitrary-precision rational, always stored in lowest terms with positive denominator.
pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p/q"` or an integer into a rational.
pub fn parse_rational(s: &str) -> crate::Result<Rational> {
    let s = s.trim();
    let bad = || crate::Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a>(xs: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    use num_integer::Integer;
    xs.into_iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}
