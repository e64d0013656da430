//! Factorization over Q: square-free decomposition, factorization modulo a
//! good prime, multifactor Hensel lifting and Zassenhaus recombination.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::modp::{Fp, Poly};
use super::QPolynomial;
use crate::{Error, Result};

type ZPoly = Vec<BigInt>;

/// Candidate primes tried when searching for a good reduction.
const PRIMES: [u64; 24] = [
    3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];
/// Number of good primes compared before picking the one with fewest factors.
const PRIME_TRIALS: usize = 5;

/// Factors a nonzero polynomial into monic irreducible factors over Q with
/// multiplicities, sorted by degree then coefficients.
pub fn factor_poly(p: &QPolynomial) -> Result<Vec<(QPolynomial, usize)>> {
    if p.is_zero() {
        return Err(Error::Domain("cannot factor the zero polynomial".into()));
    }
    let mut out = Vec::new();
    for (part, mult) in p.squarefree_decomposition() {
        for f in factor_squarefree_integer(&part.primitive_integer()) {
            out.push((QPolynomial::from_bigints(&f).monic(), mult));
        }
    }
    out.sort_by(|a, b| a.0.canonical_cmp(&b.0).then(a.1.cmp(&b.1)));
    Ok(out)
}

/// True when the polynomial has positive degree and no nontrivial factor.
pub fn is_irreducible(p: &QPolynomial) -> bool {
    p.deg() >= 1 && factor_poly(p).is_ok_and(|f| f.len() == 1 && f[0].1 == 1)
}

/// Factors a primitive square-free integer polynomial with positive leading
/// coefficient into primitive irreducible factors.
fn factor_squarefree_integer(f: &ZPoly) -> Vec<ZPoly> {
    let mut f = f.clone();
    let mut out = Vec::new();
    if f.len() <= 2 {
        return vec![f];
    }
    if f[0].is_zero() {
        out.push(vec![BigInt::zero(), BigInt::one()]);
        f.remove(0);
        if f.len() <= 2 {
            if f.len() == 2 {
                out.push(f);
            }
            return out;
        }
    }
    let lc = f.last().unwrap().clone();
    let mut best: Option<(u64, Vec<Poly>)> = None;
    let mut tried = 0;
    for &p in PRIMES.iter() {
        let fp = Fp::new(p);
        if (&lc % BigInt::from(p)).is_zero() {
            continue;
        }
        let fbar = reduce(&f, p);
        if !fp.is_squarefree(&fbar) {
            continue;
        }
        let factors = fp.factor_squarefree(&fp.monic(&fbar), 0x5eed);
        if best.as_ref().is_none_or(|(_, b)| factors.len() < b.len()) {
            best = Some((p, factors));
        }
        tried += 1;
        if tried == PRIME_TRIALS {
            break;
        }
    }
    let (p, modp_factors) = best.expect("some small prime is a good reduction");
    if modp_factors.len() == 1 {
        out.push(f);
        return out;
    }
    let bound = coefficient_bound(&f) * &lc * 2u32;
    let pz = BigInt::from(p);
    let mut modulus = pz.clone();
    let mut exponent_doublings = 0;
    while modulus <= bound {
        modulus = &modulus * &modulus;
        exponent_doublings += 1;
    }
    let lifted = multifactor_lift(&f, &modp_factors, p, exponent_doublings);
    out.extend(recombine(f, lifted, &modulus));
    out
}

/// Bound on the absolute value of coefficients of any integer factor of `f`
/// (Mignotte: `2^n * ||f||_2`, with the 2-norm rounded up).
fn coefficient_bound(f: &ZPoly) -> BigInt {
    let norm_sq: BigInt = f.iter().map(|c| c * c).sum();
    let norm = norm_sq.sqrt() + 1u32;
    norm << (f.len() - 1)
}

fn reduce(f: &ZPoly, p: u64) -> Poly {
    let pz = BigInt::from(p);
    Fp::trim(
        f.iter()
            .map(|c| c.mod_floor(&pz).to_u64().unwrap())
            .collect(),
    )
}

fn to_z(a: &Poly) -> ZPoly {
    a.iter().map(|&c| BigInt::from(c)).collect()
}

fn trim_z(mut a: ZPoly) -> ZPoly {
    while a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
    a
}

fn mod_z(a: &[BigInt], m: &BigInt) -> ZPoly {
    trim_z(a.iter().map(|c| c.mod_floor(m)).collect())
}

fn add_z(a: &[BigInt], b: &[BigInt], m: &BigInt) -> ZPoly {
    let n = a.len().max(b.len());
    let zero = BigInt::zero();
    mod_z(
        &(0..n)
            .map(|i| a.get(i).unwrap_or(&zero) + b.get(i).unwrap_or(&zero))
            .collect::<Vec<_>>(),
        m,
    )
}

fn sub_z(a: &[BigInt], b: &[BigInt], m: &BigInt) -> ZPoly {
    let n = a.len().max(b.len());
    let zero = BigInt::zero();
    mod_z(
        &(0..n)
            .map(|i| a.get(i).unwrap_or(&zero) - b.get(i).unwrap_or(&zero))
            .collect::<Vec<_>>(),
        m,
    )
}

fn mul_z(a: &[BigInt], b: &[BigInt], m: &BigInt) -> ZPoly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    mod_z(&out, m)
}

/// Division by a monic polynomial modulo `m`.
fn divrem_monic_z(a: &[BigInt], b: &[BigInt], m: &BigInt) -> (ZPoly, ZPoly) {
    debug_assert!(b.last().is_some_and(|c| c.is_one()));
    if a.len() < b.len() {
        return (vec![], mod_z(a, m));
    }
    let db = b.len() - 1;
    let mut r: ZPoly = a.to_vec();
    let mut q = vec![BigInt::zero(); a.len() - db];
    for i in (0..q.len()).rev() {
        let c = r[i + db].mod_floor(m);
        if !c.is_zero() {
            for (j, bj) in b.iter().enumerate() {
                r[i + j] -= &c * bj;
            }
        }
        q[i] = c;
    }
    r.truncate(db);
    (mod_z(&q, m), mod_z(&r, m))
}

/// One quadratic Hensel step: from `f = g h (mod m)` and `s g + t h = 1 (mod m)`
/// with `h` monic, produce the same identities modulo `m^2`.
fn hensel_step(
    m: &BigInt,
    f: &ZPoly,
    g: &ZPoly,
    h: &ZPoly,
    s: &ZPoly,
    t: &ZPoly,
) -> (ZPoly, ZPoly, ZPoly, ZPoly) {
    let m2 = m * m;
    let e = sub_z(f, &mul_z(g, h, &m2), &m2);
    let (q, r) = divrem_monic_z(&mul_z(s, &e, &m2), h, &m2);
    let g2 = add_z(&add_z(g, &mul_z(t, &e, &m2), &m2), &mul_z(&q, g, &m2), &m2);
    let h2 = add_z(h, &r, &m2);
    let b = sub_z(
        &add_z(&mul_z(s, &g2, &m2), &mul_z(t, &h2, &m2), &m2),
        &[BigInt::one()],
        &m2,
    );
    let (c, d) = divrem_monic_z(&mul_z(s, &b, &m2), &h2, &m2);
    let s2 = sub_z(s, &d, &m2);
    let t2 = sub_z(
        &sub_z(t, &mul_z(t, &b, &m2), &m2),
        &mul_z(&c, &g2, &m2),
        &m2,
    );
    (g2, h2, s2, t2)
}

/// Lifts the monic factorization `f = lc * prod factors (mod p)` to modulus
/// `p^(2^doublings)`, returning monic lifted factors.
fn multifactor_lift(f: &ZPoly, factors: &[Poly], p: u64, doublings: u32) -> Vec<ZPoly> {
    if factors.len() == 1 {
        let mut m = BigInt::from(p);
        for _ in 0..doublings {
            m = &m * &m;
        }
        let lc_inv = f.last().unwrap().modinv(&m).expect("lc coprime to p");
        return vec![mod_z(
            &f.iter().map(|c| c * &lc_inv).collect::<Vec<_>>(),
            &m,
        )];
    }
    let fp = Fp::new(p);
    let (left, right) = factors.split_at(factors.len() / 2);
    let h0 = left.iter().fold(vec![1u64], |acc, x| fp.poly_mul(&acc, x));
    let lc_p = f
        .last()
        .unwrap()
        .mod_floor(&BigInt::from(p))
        .to_u64()
        .unwrap();
    let g0 = right.iter().fold(vec![lc_p], |acc, x| fp.poly_mul(&acc, x));
    let (one, s0, t0) = fp.xgcd(&g0, &h0);
    debug_assert_eq!(one, vec![1]);
    let (mut g, mut h, mut s, mut t) = (to_z(&g0), to_z(&h0), to_z(&s0), to_z(&t0));
    let mut m = BigInt::from(p);
    for _ in 0..doublings {
        (g, h, s, t) = hensel_step(&m, f, &g, &h, &s, &t);
        m = &m * &m;
    }
    let mut out = multifactor_lift(&h, left, p, doublings);
    out.extend(multifactor_lift(&g, right, p, doublings));
    out
}

fn symmetric(a: &[BigInt], m: &BigInt) -> ZPoly {
    let half: BigInt = m >> 1;
    trim_z(
        a.iter()
            .map(|c| {
                let c = c.mod_floor(m);
                if c > half {
                    c - m
                } else {
                    c
                }
            })
            .collect(),
    )
}

fn content(a: &[BigInt]) -> BigInt {
    a.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
}

fn primitive(a: ZPoly) -> ZPoly {
    let c = content(&a);
    let sign = if a.last().is_some_and(|l| l.is_negative()) {
        -1
    } else {
        1
    };
    a.into_iter().map(|x| x / &c * sign).collect()
}

/// Exact division over Z; `None` if `b` does not divide `a`.
fn exact_div_z(a: &[BigInt], b: &[BigInt]) -> Option<ZPoly> {
    if a.len() < b.len() {
        return None;
    }
    let lb = b.last().unwrap();
    let db = b.len() - 1;
    let mut r: ZPoly = a.to_vec();
    let mut q = vec![BigInt::zero(); a.len() - db];
    for i in (0..q.len()).rev() {
        let (c, rem) = r[i + db].div_rem(lb);
        if !rem.is_zero() {
            return None;
        }
        if !c.is_zero() {
            for (j, bj) in b.iter().enumerate() {
                r[i + j] -= &c * bj;
            }
        }
        q[i] = c;
    }
    if r.iter().any(|c| !c.is_zero()) {
        return None;
    }
    Some(q)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Zassenhaus recombination of lifted modular factors into true factors.
fn recombine(mut f: ZPoly, mut lifted: Vec<ZPoly>, m: &BigInt) -> Vec<ZPoly> {
    let mut out = Vec::new();
    let mut size = 1;
    while 2 * size <= lifted.len() {
        let mut found = false;
        for subset in combinations(lifted.len(), size) {
            let lc = f.last().unwrap().clone();
            let prod = subset
                .iter()
                .fold(vec![lc.clone()], |acc, &i| mul_z(&acc, &lifted[i], m));
            let cand = primitive(symmetric(&prod, m));
            if let Some(q) = exact_div_z(&f, &cand) {
                f = q;
                out.push(cand);
                for &i in subset.iter().rev() {
                    lifted.remove(i);
                }
                found = true;
                break;
            }
        }
        if !found {
            size += 1;
        }
    }
    let f = primitive(f);
    if f.len() > 1 {
        out.push(f);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Rational;

    fn q(c: &[i64]) -> QPolynomial {
        QPolynomial::from_i64(c)
    }

    #[test]
    fn fixtures() {
        assert_eq!(
            factor_poly(&q(&[-1, 0, 1])).unwrap(),
            vec![(q(&[-1, 1]), 1), (q(&[1, 1]), 1)]
        );
        assert_eq!(
            factor_poly(&q(&[-1, 1, 1])).unwrap(),
            vec![(q(&[-1, 1, 1]), 1)]
        );
        assert_eq!(factor_poly(&q(&[4, 4, 1])).unwrap(), vec![(q(&[2, 1]), 2)]);
    }

    #[test]
    fn zero_is_domain_error() {
        assert!(matches!(
            factor_poly(&QPolynomial::zero()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn swinnerton_dyer_like_recombination() {
        // x^4 + 1 splits into quadratics modulo every prime but is irreducible.
        assert_eq!(
            factor_poly(&q(&[1, 0, 0, 0, 1])).unwrap(),
            vec![(q(&[1, 0, 0, 0, 1]), 1)]
        );
        // x^4 - 10x^2 + 1 (minimal polynomial of sqrt2 + sqrt3)
        assert!(is_irreducible(&q(&[1, 0, -10, 0, 1])));
    }

    #[test]
    fn non_monic_and_rational_input() {
        // (2x + 1)(3x - 2)(x^2 + 1) / 5
        let p = (&(&q(&[1, 2]) * &q(&[-2, 3])) * &q(&[1, 0, 1])).scale(&super::super::ratio(1, 5));
        let f = factor_poly(&p).unwrap();
        assert_eq!(
            f,
            vec![
                (
                    QPolynomial::new(vec![super::super::ratio(-2, 3), Rational::one()]),
                    1
                ),
                (
                    QPolynomial::new(vec![super::super::ratio(1, 2), Rational::one()]),
                    1
                ),
                (q(&[1, 0, 1]), 1)
            ]
        );
    }

    #[test]
    fn larger_degree_products() {
        // (x^3 - 2)(x^5 + x + 1 ... ) style product of irreducibles
        let a = q(&[-2, 0, 0, 1]);
        let b = q(&[1, 1, 0, 0, 0, 0, 0, 1]);
        let c = q(&[-1, 1, 1]);
        let p = &(&a * &b) * &c.pow(3);
        let f = factor_poly(&p).unwrap();
        let mut rebuilt = QPolynomial::one();
        for (g, e) in &f {
            assert!(g.is_monic());
            rebuilt = &rebuilt * &g.pow(*e);
        }
        assert_eq!(rebuilt, p.monic());
        assert!(f.iter().any(|(g, e)| g == &c && *e == 3));
    }

    #[test]
    fn combinations_enumerates_all() {
        assert_eq!(combinations(4, 2).len(), 6);
        assert_eq!(combinations(3, 3), vec![vec![0, 1, 2]]);
    }
}
