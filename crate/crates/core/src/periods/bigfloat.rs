//! Multiprecision reals and complex numbers over `astro-float`, carrying a
//! working precision in decimal digits.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use astro_float::{BigFloat as Raw, Consts, Radix, RoundingMode, Sign};
use num_bigint::{BigInt, BigUint};
use num_traits::Zero;

use crate::algebra::Rational;

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constant cache"));
}

fn with_cc<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// Binary precision for a number of decimal digits, with 32 guard bits.
pub fn bits_for_digits(digits: u32) -> usize {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as usize + 32
}

/// A real number with a working precision.
#[derive(Clone)]
pub struct BigFloat {
    raw: Raw,
    bits: usize,
}

impl BigFloat {
    pub fn zero(digits: u32) -> Self {
        Self::from_i64(0, digits)
    }

    pub fn from_i64(x: i64, digits: u32) -> Self {
        let bits = bits_for_digits(digits);
        Self {
            raw: Raw::from_i64(x, bits),
            bits,
        }
    }

    pub fn from_bigint(x: &BigInt, digits: u32) -> Self {
        let bits = bits_for_digits(digits);
        let raw = with_cc(|cc| Raw::parse(&x.to_string(), Radix::Dec, bits, RM, cc));
        Self { raw, bits }
    }

    pub fn from_rational(q: &Rational, digits: u32) -> Self {
        let n = Self::from_bigint(q.numer(), digits);
        let d = Self::from_bigint(q.denom(), digits);
        &n / &d
    }

    /// Parses a decimal literal such as `1.4142` or `-2.5e-3`.
    pub fn parse(s: &str, digits: u32) -> crate::Result<Self> {
        let bits = bits_for_digits(digits);
        let raw = with_cc(|cc| Raw::parse(s, Radix::Dec, bits, RM, cc));
        if raw.is_nan() {
            return Err(crate::Error::Parse(format!("not a decimal number: {s}")));
        }
        Ok(Self { raw, bits })
    }

    pub fn pi(digits: u32) -> Self {
        let bits = bits_for_digits(digits);
        Self {
            raw: with_cc(|cc| cc.pi(bits, RM)),
            bits,
        }
    }

    /// Decimal digits of working precision.
    pub fn digits(&self) -> u32 {
        ((self.bits - 32) as f64 / std::f64::consts::LOG2_10).floor() as u32
    }

    fn wrap(&self, raw: Raw) -> Self {
        Self {
            raw,
            bits: self.bits,
        }
    }

    fn prec(&self, other: &Self) -> usize {
        self.bits.max(other.bits)
    }

    pub fn is_zero(&self) -> bool {
        self.raw.is_zero()
    }

    pub fn abs(&self) -> Self {
        self.wrap(self.raw.abs())
    }

    pub fn exp(&self) -> Self {
        self.wrap(with_cc(|cc| self.raw.exp(self.bits, RM, cc)))
    }

    pub fn sin(&self) -> Self {
        self.wrap(with_cc(|cc| self.raw.sin(self.bits, RM, cc)))
    }

    pub fn cos(&self) -> Self {
        self.wrap(with_cc(|cc| self.raw.cos(self.bits, RM, cc)))
    }

    pub fn sqrt(&self) -> Self {
        self.wrap(self.raw.sqrt(self.bits, RM))
    }

    pub fn div_i64(&self, d: i64) -> Self {
        self / &Self {
            raw: Raw::from_i64(d, self.bits),
            bits: self.bits,
        }
    }

    pub fn mul_i64(&self, d: i64) -> Self {
        self * &Self {
            raw: Raw::from_i64(d, self.bits),
            bits: self.bits,
        }
    }

    /// `log10 |x|`, or `-inf` for zero.
    pub fn log10_abs(&self) -> f64 {
        match self.raw.as_raw_parts() {
            Some((m, _, _, e, _)) if !self.is_zero() => {
                let top = *m.last().expect("nonempty mantissa") as f64 / 2f64.powi(64);
                top.log10() + e as f64 * std::f64::consts::LOG10_2
            }
            _ => f64::NEG_INFINITY,
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let s = with_cc(|cc| self.raw.format(Radix::Dec, RM, cc)).unwrap_or_default();
        s.parse().unwrap_or(f64::NAN)
    }

    /// Nearest integer, ties away from zero.
    pub fn round_to_bigint(&self) -> BigInt {
        let Some((m, _, sign, e, _)) = self.raw.as_raw_parts() else {
            return BigInt::zero();
        };
        if self.is_zero() {
            return BigInt::zero();
        }
        let mant = BigUint::from_slice(
            &m.iter()
                .flat_map(|w| [*w as u32, (*w >> 32) as u32])
                .collect::<Vec<_>>(),
        );
        let shift = e as i64 - 64 * m.len() as i64;
        let mag = if shift >= 0 {
            mant << shift as usize
        } else {
            let s = (-shift) as usize;
            (mant + (BigUint::from(1u8) << (s - 1))) >> s
        };
        let v = BigInt::from(mag);
        if sign == Sign::Neg {
            -v
        } else {
            v
        }
    }

    /// Decimal string with `digits` significant digits.
    pub fn to_decimal(&self, digits: u32) -> String {
        let p = ((digits as f64) * std::f64::consts::LOG2_10).ceil() as usize + 4;
        let mut r = self.raw.clone();
        let _ = r.set_precision(p.min(self.bits), RM);
        with_cc(|cc| r.format(Radix::Dec, RM, cc)).unwrap_or_else(|_| "NaN".into())
    }
}

impl PartialEq for BigFloat {
    fn eq(&self, other: &Self) -> bool {
        self.raw.cmp(&other.raw) == Some(0)
    }
}

impl PartialOrd for BigFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.raw.cmp(&other.raw).map(|c| c.cmp(&0))
    }
}

impl fmt::Debug for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal(self.digits().min(40)))
    }
}

impl fmt::Display for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal(self.digits()))
    }
}

impl<'a> Add<&'a BigFloat> for &'a BigFloat {
    type Output = BigFloat;
    fn add(self, o: &BigFloat) -> BigFloat {
        let p = self.prec(o);
        BigFloat {
            raw: self.raw.add(&o.raw, p, RM),
            bits: p,
        }
    }
}

impl<'a> Sub<&'a BigFloat> for &'a BigFloat {
    type Output = BigFloat;
    fn sub(self, o: &BigFloat) -> BigFloat {
        let p = self.prec(o);
        BigFloat {
            raw: self.raw.sub(&o.raw, p, RM),
            bits: p,
        }
    }
}

impl<'a> Mul<&'a BigFloat> for &'a BigFloat {
    type Output = BigFloat;
    fn mul(self, o: &BigFloat) -> BigFloat {
        let p = self.prec(o);
        BigFloat {
            raw: self.raw.mul(&o.raw, p, RM),
            bits: p,
        }
    }
}

impl<'a> std::ops::Div<&'a BigFloat> for &'a BigFloat {
    type Output = BigFloat;
    fn div(self, o: &BigFloat) -> BigFloat {
        let p = self.prec(o);
        BigFloat {
            raw: self.raw.div(&o.raw, p, RM),
            bits: p,
        }
    }
}

impl Neg for &BigFloat {
    type Output = BigFloat;
    fn neg(self) -> BigFloat {
        self.wrap(-&self.raw)
    }
}

/// `re + i·im`.
#[derive(Clone, Debug, PartialEq)]
pub struct Complex {
    pub re: BigFloat,
    pub im: BigFloat,
}

impl Complex {
    pub fn new(re: BigFloat, im: BigFloat) -> Self {
        Self { re, im }
    }

    pub fn zero(digits: u32) -> Self {
        Self {
            re: BigFloat::zero(digits),
            im: BigFloat::zero(digits),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        Self {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self {
            re: &(&self.re * &o.re) - &(&self.im * &o.im),
            im: &(&self.re * &o.im) + &(&self.im * &o.re),
        }
    }

    pub fn scale(&self, x: &BigFloat) -> Self {
        Self {
            re: &self.re * x,
            im: &self.im * x,
        }
    }

    /// `|z|²`.
    pub fn norm_sqr(&self) -> BigFloat {
        &(&self.re * &self.re) + &(&self.im * &self.im)
    }

    /// `e^{2πi z}` for `z = x + iy`.
    pub fn exp_2pi_i(x: &BigFloat, y: &BigFloat) -> Self {
        let two_pi = BigFloat::pi(x.digits()).mul_i64(2);
        let modulus = (&-&two_pi * y).exp();
        let arg = &two_pi * x;
        Self {
            re: &modulus * &arg.cos(),
            im: &modulus * &arg.sin(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ratio;

    #[test]
    fn arithmetic_and_rounding() {
        let x = BigFloat::from_rational(&ratio(-7, 2), 50);
        assert_eq!(x.round_to_bigint(), BigInt::from(-4));
        let y = BigFloat::from_rational(&ratio(10, 3), 50);
        assert_eq!(y.round_to_bigint(), BigInt::from(3));
        let big = BigFloat::from_bigint(&BigInt::from(10).pow(40), 60);
        assert_eq!(big.round_to_bigint(), BigInt::from(10).pow(40));
        assert!((y.to_f64() - 10.0 / 3.0).abs() < 1e-15);
        assert!((BigFloat::from_i64(1000, 50).log10_abs() - 3.0).abs() < 1e-9);
    }

    #[test]
    fn high_precision_sqrt2() {
        let two = BigFloat::from_i64(2, 100);
        let r = two.sqrt();
        let err = &(&r * &r) - &two;
        assert!(err.log10_abs() < -95.0);
        assert!(r.to_decimal(30).starts_with("1.41421356237309504880168872"));
    }

    #[test]
    fn unit_circle() {
        let d = 60;
        let x = BigFloat::from_rational(&ratio(1, 7), d);
        let z = Complex::exp_2pi_i(&x, &BigFloat::zero(d));
        let one = BigFloat::from_i64(1, d);
        assert!((&z.norm_sqr() - &one).log10_abs() < -55.0);
    }
}
