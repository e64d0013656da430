//! LLL lattice reduction with exact rational Gram-Schmidt data.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::algebra::Rational;

fn dot_int(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn dot_mixed(a: &[BigInt], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| {
        acc + y * Rational::from_integer(x.clone())
    })
}

fn dot_rat(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

/// Reduces the rows of `basis`, which must be linearly independent, with
/// parameter `δ = 3/4`.
pub fn lll(mut b: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    let n = b.len();
    if n <= 1 {
        return b;
    }
    let delta = Rational::new(3.into(), 4.into());
    let half = Rational::new(1.into(), 2.into());
    let mut mu = vec![vec![Rational::zero(); n]; n];
    let mut bstar: Vec<Vec<Rational>> = vec![vec![]; n];
    let mut bb = vec![Rational::zero(); n];
    bstar[0] = b[0]
        .iter()
        .map(|x| Rational::from_integer(x.clone()))
        .collect();
    bb[0] = Rational::from_integer(dot_int(&b[0], &b[0]));
    let mut k = 1;
    let mut kmax = 0;

    let red = |b: &mut Vec<Vec<BigInt>>, mu: &mut Vec<Vec<Rational>>, k: usize, l: usize| {
        if mu[k][l].abs() <= half {
            return;
        }
        let q = mu[k][l].round();
        let qi = q.to_integer();
        let bl = b[l].clone();
        for (x, y) in b[k].iter_mut().zip(&bl) {
            *x -= &qi * y;
        }
        mu[k][l] -= &q;
        for i in 0..l {
            let t = &q * &mu[l][i];
            mu[k][i] -= t;
        }
    };

    while k < n {
        if k > kmax {
            kmax = k;
            let mut s: Vec<Rational> = b[k]
                .iter()
                .map(|x| Rational::from_integer(x.clone()))
                .collect();
            for j in 0..k {
                mu[k][j] = dot_mixed(&b[k], &bstar[j]) / &bb[j];
                for (x, y) in s.iter_mut().zip(&bstar[j]) {
                    *x -= &mu[k][j] * y;
                }
            }
            bb[k] = dot_rat(&s, &s);
            bstar[k] = s;
        }
        red(&mut b, &mut mu, k, k - 1);
        let m = mu[k][k - 1].clone();
        if bb[k] < (&delta - &m * &m) * &bb[k - 1] {
            // swap k and k-1
            b.swap(k, k - 1);
            for j in 0..k - 1 {
                let t = mu[k][j].clone();
                mu[k][j] = mu[k - 1][j].clone();
                mu[k - 1][j] = t;
            }
            let big = &bb[k] + &m * &m * &bb[k - 1];
            mu[k][k - 1] = &m * &bb[k - 1] / &big;
            let old = bstar[k - 1].clone();
            let new_prev: Vec<Rational> =
                bstar[k].iter().zip(&old).map(|(x, y)| x + &m * y).collect();
            let ratio = &bb[k] / &big;
            let new_k: Vec<Rational> = old
                .iter()
                .zip(&bstar[k])
                .map(|(y, x)| -&mu[k][k - 1] * x + &ratio * y)
                .collect();
            bstar[k - 1] = new_prev;
            bstar[k] = new_k;
            bb[k] = &bb[k - 1] * &bb[k] / &big;
            bb[k - 1] = big;
            for i in k + 1..=kmax {
                let t = mu[i][k].clone();
                mu[i][k] = &mu[i][k - 1] - &m * &t;
                mu[i][k - 1] = &t + &mu[k][k - 1] * &mu[i][k];
            }
            k = (k - 1).max(1);
        } else {
            for l in (0..k - 1).rev() {
                red(&mut b, &mut mu, k, l);
            }
            k += 1;
        }
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn reduces_classic_example() {
        let out = lll(vec![v(&[1, 1, 1]), v(&[-1, 0, 2]), v(&[3, 5, 6])]);
        // reduced basis from the textbook example
        assert_eq!(out, vec![v(&[0, 1, 0]), v(&[1, 0, 1]), v(&[-1, 0, 2])]);
    }

    #[test]
    fn finds_short_relation() {
        // 1, 1/2, 1/4 scaled by 10^6: relation (1, -2, 0) and (0, 1, -2)
        let s = 1_000_000;
        let out = lll(vec![
            v(&[1, 0, 0, s]),
            v(&[0, 1, 0, s / 2]),
            v(&[0, 0, 1, s / 4]),
        ]);
        let relations = out.iter().filter(|r| r[3].is_zero()).count();
        assert_eq!(relations, 2);
    }
}
