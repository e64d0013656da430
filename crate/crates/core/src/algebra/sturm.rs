//! Sturm sequences: exact real-root counting and isolation over Q.

use num_traits::{One, Signed, Zero};

use super::{QPolynomial, Rational};

/// Sturm chain of the square-free part of a polynomial.
#[derive(Clone, Debug)]
pub struct SturmSequence {
    chain: Vec<QPolynomial>,
}

impl SturmSequence {
    pub fn new(p: &QPolynomial) -> Self {
        let p = p.squarefree_part();
        let mut chain = vec![p.clone()];
        if p.deg() == 0 {
            return Self { chain };
        }
        chain.push(p.derivative());
        loop {
            let n = chain.len();
            let r = chain[n - 2].rem(&chain[n - 1]).expect("nonzero");
            if r.is_zero() {
                break;
            }
            chain.push(-&r);
        }
        Self { chain }
    }

    pub fn polynomial(&self) -> &QPolynomial {
        &self.chain[0]
    }

    fn variations(signs: impl Iterator<Item = i8>) -> usize {
        let mut count = 0;
        let mut last = 0i8;
        for s in signs.filter(|&s| s != 0) {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    fn sign(q: &Rational) -> i8 {
        if q.is_zero() {
            0
        } else if q.is_positive() {
            1
        } else {
            -1
        }
    }

    fn variations_at(&self, x: &Rational) -> usize {
        Self::variations(self.chain.iter().map(|p| Self::sign(&p.eval(x))))
    }

    fn variations_at_infinity(&self, positive: bool) -> usize {
        Self::variations(self.chain.iter().map(|p| {
            let s = Self::sign(&p.leading());
            if positive || p.deg() % 2 == 0 {
                s
            } else {
                -s
            }
        }))
    }

    /// Number of distinct real roots in the half-open interval `(a, b]`.
    pub fn count_in(&self, a: &Rational, b: &Rational) -> usize {
        self.variations_at(a) - self.variations_at(b)
    }

    /// Number of distinct real roots.
    pub fn count_real(&self) -> usize {
        self.variations_at_infinity(false) - self.variations_at_infinity(true)
    }
}

/// Cauchy bound: every root has absolute value below the returned value.
pub fn root_bound(p: &QPolynomial) -> Rational {
    let lc = p.leading().abs();
    let m = p.coeffs()[..p.deg()]
        .iter()
        .map(|c| c.abs() / &lc)
        .max()
        .unwrap_or_else(Rational::zero);
    m + Rational::one()
}

/// A real root of a square-free polynomial located in `(lo, hi]`, the
/// unique root of the polynomial there.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootInterval {
    pub lo: Rational,
    pub hi: Rational,
}

impl RootInterval {
    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from_integer(2.into())
    }

    /// Halves the interval, keeping the root.
    pub fn bisect(&mut self, seq: &SturmSequence) {
        let mid = self.midpoint();
        if seq.count_in(&self.lo, &mid) == 1 {
            self.hi = mid;
        } else {
            self.lo = mid;
        }
    }

    /// True when the root is exactly the right endpoint.
    pub fn is_exact(&self, seq: &SturmSequence) -> bool {
        seq.polynomial().eval(&self.hi).is_zero()
    }
}

/// Isolating intervals for all real roots, in increasing order.
pub fn isolate_real_roots(p: &QPolynomial) -> Vec<RootInterval> {
    let seq = SturmSequence::new(p);
    if seq.polynomial().deg() == 0 {
        return vec![];
    }
    let b = root_bound(seq.polynomial());
    let mut out = Vec::new();
    let mut stack = vec![(-b.clone(), b)];
    while let Some((lo, hi)) = stack.pop() {
        match seq.count_in(&lo, &hi) {
            0 => {}
            1 => out.push(RootInterval { lo, hi }),
            _ => {
                let mid = (&lo + &hi) / Rational::from_integer(2.into());
                stack.push((lo, mid.clone()));
                stack.push((mid, hi));
            }
        }
    }
    out.sort_by(|a, b| a.lo.cmp(&b.lo));
    out
}
