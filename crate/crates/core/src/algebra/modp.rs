//! Polynomials over F_p for word-sized primes, with distinct-degree and
//! equal-degree (Cantor-Zassenhaus) factorization.

use num_bigint::BigUint;

pub(crate) type Poly = Vec<u64>;

#[derive(Clone, Copy, Debug)]
pub(crate) struct Fp {
    pub p: u64,
}

impl Fp {
    pub fn new(p: u64) -> Self {
        debug_assert!(p < (1 << 31));
        Self { p }
    }

    fn mul(self, a: u64, b: u64) -> u64 {
        a * b % self.p
    }

    fn sub(self, a: u64, b: u64) -> u64 {
        (a + self.p - b) % self.p
    }

    pub fn inv(self, a: u64) -> u64 {
        self.pow(a, self.p - 2)
    }

    fn pow(self, mut a: u64, mut e: u64) -> u64 {
        let mut r = 1;
        a %= self.p;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    pub fn trim(mut a: Poly) -> Poly {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    pub fn poly_sub(self, a: &[u64], b: &[u64]) -> Poly {
        let n = a.len().max(b.len());
        Self::trim(
            (0..n)
                .map(|i| self.sub(*a.get(i).unwrap_or(&0), *b.get(i).unwrap_or(&0)))
                .collect(),
        )
    }

    #[cfg(test)]
    pub fn poly_add(self, a: &[u64], b: &[u64]) -> Poly {
        let n = a.len().max(b.len());
        Self::trim(
            (0..n)
                .map(|i| (a.get(i).unwrap_or(&0) + b.get(i).unwrap_or(&0)) % self.p)
                .collect(),
        )
    }

    pub fn poly_mul(self, a: &[u64], b: &[u64]) -> Poly {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y) % self.p;
            }
        }
        Self::trim(out)
    }

    pub fn monic(self, a: &[u64]) -> Poly {
        match a.last() {
            None => vec![],
            Some(&lc) => {
                let inv = self.inv(lc);
                a.iter().map(|&c| self.mul(c, inv)).collect()
            }
        }
    }

    pub fn div_rem(self, a: &[u64], b: &[u64]) -> (Poly, Poly) {
        assert!(!b.is_empty(), "division by zero polynomial");
        if a.len() < b.len() {
            return (vec![], a.to_vec());
        }
        let inv = self.inv(*b.last().unwrap());
        let db = b.len() - 1;
        let mut r = a.to_vec();
        let mut q = vec![0u64; a.len() - db];
        for i in (0..q.len()).rev() {
            let c = self.mul(r[i + db], inv);
            q[i] = c;
            if c != 0 {
                for (j, &bj) in b.iter().enumerate() {
                    r[i + j] = self.sub(r[i + j], self.mul(c, bj));
                }
            }
        }
        r.truncate(db);
        (Self::trim(q), Self::trim(r))
    }

    pub fn rem(self, a: &[u64], b: &[u64]) -> Poly {
        self.div_rem(a, b).1
    }

    pub fn gcd(self, a: &[u64], b: &[u64]) -> Poly {
        let (mut a, mut b) = (a.to_vec(), b.to_vec());
        while !b.is_empty() {
            let r = self.rem(&a, &b);
            a = b;
            b = r;
        }
        self.monic(&a)
    }

    /// Returns `(g, s, t)` with `s a + t b = g` monic.
    pub fn xgcd(self, a: &[u64], b: &[u64]) -> (Poly, Poly, Poly) {
        let (mut r0, mut r1) = (a.to_vec(), b.to_vec());
        let (mut s0, mut s1) = (vec![1u64], vec![]);
        let (mut t0, mut t1) = (vec![], vec![1u64]);
        while !r1.is_empty() {
            let (q, r) = self.div_rem(&r0, &r1);
            r0 = std::mem::replace(&mut r1, r);
            let s = self.poly_sub(&s0, &self.poly_mul(&q, &s1));
            s0 = std::mem::replace(&mut s1, s);
            let t = self.poly_sub(&t0, &self.poly_mul(&q, &t1));
            t0 = std::mem::replace(&mut t1, t);
        }
        let inv = self.inv(*r0.last().expect("gcd of zero polynomials"));
        let sc = |v: Poly| Self::trim(v.into_iter().map(|c| self.mul(c, inv)).collect());
        (sc(r0), sc(s0), sc(t0))
    }

    pub fn derivative(self, a: &[u64]) -> Poly {
        Self::trim(
            a.iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| self.mul(c, i as u64 % self.p))
                .collect(),
        )
    }

    fn powmod(self, base: &[u64], e: &BigUint, m: &[u64]) -> Poly {
        let mut result = vec![1u64];
        let mut b = self.rem(base, m);
        for i in 0..e.bits() {
            if e.bit(i) {
                result = self.rem(&self.poly_mul(&result, &b), m);
            }
            b = self.rem(&self.poly_mul(&b, &b), m);
        }
        result
    }

    pub fn is_squarefree(self, f: &[u64]) -> bool {
        let d = self.derivative(f);
        !d.is_empty() && self.gcd(f, &d).len() == 1
    }

    /// Factors a monic square-free polynomial into monic irreducibles.
    pub fn factor_squarefree(self, f: &[u64], seed: u64) -> Vec<Poly> {
        let mut rng = SplitMix(seed ^ self.p);
        let mut out = Vec::new();
        for (g, d) in self.distinct_degree(f) {
            self.equal_degree(&g, d, &mut rng, &mut out);
        }
        out.sort();
        out
    }

    fn distinct_degree(self, f: &[u64]) -> Vec<(Poly, usize)> {
        let mut out = Vec::new();
        let mut f = f.to_vec();
        let x = vec![0u64, 1];
        let mut h = x.clone();
        let p = BigUint::from(self.p);
        let mut i = 0;
        while f.len() > 1 {
            i += 1;
            if 2 * i > f.len() - 1 {
                out.push((f.clone(), f.len() - 1));
                break;
            }
            h = self.powmod(&h, &p, &f);
            let g = self.gcd(&self.poly_sub(&h, &x), &f);
            if g.len() > 1 {
                f = self.div_rem(&f, &g).0;
                h = self.rem(&h, &f);
                out.push((g, i));
            }
        }
        out
    }

    fn equal_degree(self, g: &[u64], d: usize, rng: &mut SplitMix, out: &mut Vec<Poly>) {
        let n = g.len() - 1;
        if n == d {
            out.push(self.monic(g));
            return;
        }
        let e = (BigUint::from(self.p).pow(d as u32) - 1u32) / 2u32;
        loop {
            let a: Poly = Self::trim((0..n).map(|_| rng.next() % self.p).collect());
            if a.len() < 2 {
                continue;
            }
            let b = self.poly_sub(&self.powmod(&a, &e, g), &[1]);
            let h = self.gcd(&b, g);
            if h.len() > 1 && h.len() < g.len() {
                let rest = self.div_rem(g, &h).0;
                self.equal_degree(&h, d, rng, out);
                self.equal_degree(&rest, d, rng, out);
                return;
            }
        }
    }
}

/// Small deterministic generator for splitting polynomials.
struct SplitMix(u64);

impl SplitMix {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factors_product_of_linears() {
        let fp = Fp::new(7);
        // (x-1)(x-2)(x-3) mod 7
        let f = fp.poly_mul(&fp.poly_mul(&[6, 1], &[5, 1]), &[4, 1]);
        let fs = fp.factor_squarefree(&f, 1);
        assert_eq!(fs, vec![vec![4, 1], vec![5, 1], vec![6, 1]]);
    }

    #[test]
    fn irreducible_quadratic_stays_whole() {
        let fp = Fp::new(7);
        // x^2 + 1 is irreducible mod 7
        assert_eq!(fp.factor_squarefree(&[1, 0, 1], 3), vec![vec![1, 0, 1]]);
    }

    #[test]
    fn xgcd_mod_p() {
        let fp = Fp::new(11);
        let a = vec![3, 0, 1];
        let b = vec![1, 1];
        let (g, s, t) = fp.xgcd(&a, &b);
        assert_eq!(g, vec![1]);
        assert_eq!(
            fp.poly_add(&fp.poly_mul(&s, &a), &fp.poly_mul(&t, &b)),
            vec![1]
        );
    }
}
