//! Γ₀(N) combinatorics: membership, the projective line P¹(Z/N), and the
//! index, elliptic-point, cusp and genus counts of X₀(N).

use crate::{Error, Result};

/// A level `N >= 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Level(u64);

impl Level {
    pub fn new(n: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!("level must be at least 2, got {n}")));
        }
        Ok(Self(n))
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

impl std::fmt::Display for Level {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// Integer 2x2 matrix `[[a, b], [c, d]]`.
pub type Mat2 = [[i64; 2]; 2];

/// True iff `det m = 1` and `c ≡ 0 (mod N)`.
pub fn gamma0_contains(m: &Mat2, n: Level) -> bool {
    let det = m[0][0] as i128 * m[1][1] as i128 - m[0][1] as i128 * m[1][0] as i128;
    det == 1 && m[1][0].rem_euclid(n.0 as i64) == 0
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Extended Euclid: `(g, x, y)` with `a x + b y = g >= 0`.
pub fn xgcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i64, 0i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2
        && (2..)
            .take_while(|p| p * p <= n)
            .all(|p| !n.is_multiple_of(p))
}

/// Primes in increasing order starting from 2.
pub fn primes() -> impl Iterator<Item = u64> {
    (2u64..).filter(|&n| is_prime(n))
}

pub fn euler_phi(n: u64) -> u64 {
    prime_factors(n).iter().fold(n, |acc, p| acc / p * (p - 1))
}

fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = (r as u128 * a as u128 % m as u128) as u64;
        }
        a = (a as u128 * a as u128 % m as u128) as u64;
        e >>= 1;
    }
    r
}

/// Legendre symbol `(a / p)` for an odd prime `p`, by Euler's criterion.
pub fn legendre(a: i64, p: u64) -> i32 {
    let a = a.rem_euclid(p as i64) as u64;
    if a == 0 {
        return 0;
    }
    match pow_mod(a, (p - 1) / 2, p) {
        1 => 1,
        x if x == p - 1 => -1,
        _ => unreachable!("p is prime"),
    }
}

/// A point `(c : d)` of P¹(Z/N) in canonical form: the lexicographically
/// smallest pair among all unit multiples.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct P1Point {
    pub c: u64,
    pub d: u64,
}

/// Canonical representatives of P¹(Z/N) with an index lookup table.
#[derive(Clone, Debug)]
pub struct P1List {
    level: Level,
    points: Vec<P1Point>,
    /// `table[c * N + d]` is the index of the class of `(c, d)`, or `u32::MAX`.
    table: Vec<u32>,
}

impl P1List {
    pub fn new(level: Level) -> Self {
        let n = level.0;
        let units: Vec<u64> = (1..n).filter(|&u| gcd(u as i64, n as i64) == 1).collect();
        let mut table = vec![u32::MAX; (n * n) as usize];
        let mut points = Vec::new();
        // scanning in lexicographic order meets each class first at its minimum
        for c in 0..n {
            for d in 0..n {
                if table[(c * n + d) as usize] != u32::MAX
                    || gcd(gcd(c as i64, d as i64), n as i64) != 1
                {
                    continue;
                }
                let idx = points.len() as u32;
                points.push(P1Point { c, d });
                for &u in &units {
                    let (uc, ud) = (u * c % n, u * d % n);
                    table[(uc * n + ud) as usize] = idx;
                }
            }
        }
        Self {
            level,
            points,
            table,
        }
    }

    pub fn level(&self) -> Level {
        self.level
    }

    pub fn points(&self) -> &[P1Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Index of the class of `(c : d)`, or `None` when `gcd(c, d, N) > 1`.
    pub fn index(&self, c: i64, d: i64) -> Option<usize> {
        let n = self.level.0 as i64;
        let (c, d) = (c.rem_euclid(n), d.rem_euclid(n));
        let i = self.table[(c * n + d) as usize];
        (i != u32::MAX).then_some(i as usize)
    }

    pub fn normalize(&self, c: i64, d: i64) -> Option<P1Point> {
        self.index(c, d).map(|i| self.points[i])
    }
}

/// Canonical representatives of P¹(Z/N), one per class.
pub fn p1_enumerate(n: Level) -> Vec<P1Point> {
    P1List::new(n).points
}

/// Index, elliptic-point counts, cusp count and genus of X₀(N).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CurveData {
    pub level: Level,
    pub index_mu: u64,
    pub nu2: u64,
    pub nu3: u64,
    pub nu_inf: u64,
    pub genus: u64,
}

/// Index `[SL₂(Z) : Γ₀(N)] = N ∏_{p|N} (1 + 1/p)`.
pub fn index_mu(n: Level) -> u64 {
    prime_factors(n.0)
        .iter()
        .fold(n.0, |acc, p| acc / p * (p + 1))
}

pub fn curve_data(n: Level) -> CurveData {
    let ps = prime_factors(n.0);
    let mu = index_mu(n);
    let nu2 = if n.0.is_multiple_of(4) {
        0
    } else {
        ps.iter()
            .map(|&p| {
                if p == 2 {
                    1
                } else {
                    (1 + legendre(-1, p)) as u64
                }
            })
            .product()
    };
    let nu3 = if n.0.is_multiple_of(9) {
        0
    } else {
        ps.iter()
            .map(|&p| match p {
                2 => 0,
                3 => 1,
                _ => (1 + legendre(-3, p)) as u64,
            })
            .product()
    };
    let nu_inf: u64 = divisors(n.0)
        .into_iter()
        .map(|d| euler_phi(gcd(d as i64, (n.0 / d) as i64) as u64))
        .sum();
    let twelve_g = 12 + mu as i64 - 3 * nu2 as i64 - 4 * nu3 as i64 - 6 * nu_inf as i64;
    debug_assert!(
        twelve_g >= 0 && twelve_g % 12 == 0,
        "genus formula not integral at N={n}"
    );
    CurveData {
        level: n,
        index_mu: mu,
        nu2,
        nu3,
        nu_inf,
        genus: (twelve_g / 12) as u64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lv(n: u64) -> Level {
        Level::new(n).unwrap()
    }

    #[test]
    fn membership() {
        assert!(gamma0_contains(&[[1, 1], [0, 1]], lv(11)));
        assert!(!gamma0_contains(&[[1, 0], [1, 1]], lv(11)));
        assert!(gamma0_contains(&[[1, 0], [11, 1]], lv(11)));
        assert!(!gamma0_contains(&[[2, 0], [11, 1]], lv(11)));
        assert!(Level::new(1).is_err());
    }

    #[test]
    fn p1_sizes() {
        assert_eq!(p1_enumerate(lv(2)).len(), 3);
        assert_eq!(p1_enumerate(lv(11)).len(), 12);
        assert_eq!(p1_enumerate(lv(23)).len(), 24);
        let l = P1List::new(lv(12));
        assert_eq!(l.len() as u64, index_mu(lv(12)));
        assert_eq!(l.index(2, 4), None);
        assert_eq!(l.normalize(5, 5), Some(P1Point { c: 1, d: 1 }));
    }

    #[test]
    fn curve_fixtures() {
        let c = curve_data(lv(11));
        assert_eq!(
            (c.index_mu, c.nu2, c.nu3, c.nu_inf, c.genus),
            (12, 0, 0, 2, 1)
        );
        let c = curve_data(lv(23));
        assert_eq!(
            (c.index_mu, c.nu2, c.nu3, c.nu_inf, c.genus),
            (24, 0, 0, 2, 2)
        );
        let c = curve_data(lv(37));
        assert_eq!(
            (c.index_mu, c.nu2, c.nu3, c.nu_inf, c.genus),
            (38, 2, 2, 2, 2)
        );
        let c = curve_data(lv(2));
        assert_eq!((c.nu2, c.nu3, c.genus), (1, 0, 0));
        assert_eq!(curve_data(lv(3)).nu3, 1);
    }

    #[test]
    fn legendre_by_euler() {
        assert_eq!(legendre(-1, 5), 1);
        assert_eq!(legendre(-1, 7), -1);
        assert_eq!(legendre(-3, 7), 1);
        assert_eq!(legendre(-3, 5), -1);
        assert_eq!(legendre(10, 5), 0);
    }

    #[test]
    fn xgcd_signs() {
        let (g, x, y) = xgcd(-12, 18);
        assert_eq!(g, 6);
        assert_eq!(-12 * x + 18 * y, 6);
    }
}
