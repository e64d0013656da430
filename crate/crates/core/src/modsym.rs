//! Weight-2 modular symbols for Γ₀(N) in the Manin-symbol presentation.
//!
//! A Manin symbol `(c : d)` stands for `g{0, ∞}` where `g` is any matrix of
//! SL₂(Z) with bottom row congruent to `(c, d)`. The space is the quotient of
//! the free Q-space on P¹(Z/N) by the 2-term relations `x + xσ = 0` and the
//! 3-term relations `x + xτ + xτ² = 0`.

use num_traits::{One, Zero};

use crate::algebra::{QMatrix, Rational};
use crate::congruence::{gcd, xgcd, Level, P1List, P1Point};

/// Sparse vector of `(coordinate, value)` pairs with distinct coordinates.
pub type SparseVec = Vec<(usize, Rational)>;

/// A Manin symbol, labelled by its canonical point of P¹(Z/N).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ManinSymbol {
    pub point: P1Point,
}

/// A cusp `p/q` in lowest terms with `q >= 0`; infinity is `1/0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Cusp {
    pub p: i64,
    pub q: i64,
}

impl Cusp {
    pub fn new(p: i64, q: i64) -> Self {
        let g = gcd(p, q).max(1);
        let (p, q) = (p / g, q / g);
        if q < 0 || (q == 0 && p < 0) {
            Self { p: -p, q: -q }
        } else {
            Self { p, q }
        }
    }

    pub fn infinity() -> Self {
        Self { p: 1, q: 0 }
    }

    /// Γ₀(N)-equivalence: `s₁q₂ ≡ s₂q₁ (mod gcd(q₁q₂, N))` where `pᵢsᵢ ≡ 1 (mod qᵢ)`.
    pub fn equivalent(&self, other: &Cusp, n: Level) -> bool {
        let s = |c: &Cusp| -> i64 {
            if c.q <= 1 {
                return if c.q == 0 { 1 } else { 0 };
            }
            xgcd(c.p, c.q).1.rem_euclid(c.q)
        };
        let n = n.get() as i128;
        let m = gcd_i128(self.q as i128 * other.q as i128, n);
        let diff = s(self) as i128 * other.q as i128 - s(other) as i128 * self.q as i128;
        diff.rem_euclid(m) == 0
    }
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Lifts `(c, d)` with `gcd(c, d, N) = 1` to a matrix of SL₂(Z) whose bottom
/// row is congruent to `(c, d)` modulo `N`.
pub fn lift_to_sl2(c: i64, d: i64, n: Level) -> [[i64; 2]; 2] {
    let n = n.get() as i64;
    let mut c = c.rem_euclid(n);
    let d0 = d.rem_euclid(n);
    if c == 0 {
        c = n;
    }
    let d = (0..)
        .map(|k| d0 + k * n)
        .find(|&d| gcd(c, d) == 1)
        .expect("a coprime lift exists");
    let (_, x, y) = xgcd(d, c);
    // a d - b c = 1 with a = x, b = -y
    [[x, -y], [c, d]]
}

/// The relation quotient: a deterministic Q-basis and the coordinates of
/// every Manin symbol in it.
#[derive(Clone, Debug)]
pub struct ModSymSpace {
    level: Level,
    p1: P1List,
    /// Manin symbol represented by each basis vector.
    basis_syms: Vec<usize>,
    /// Coordinates of each Manin symbol in the quotient basis.
    coords: Vec<SparseVec>,
    cusps: Vec<Cusp>,
    boundary: QMatrix,
}

/// Quotient of the free space on Manin symbols by the Manin relations.
pub fn build_space(n: Level) -> ModSymSpace {
    let p1 = P1List::new(n);
    let mu = p1.len();
    let pts = p1.points().to_vec();
    let act = |i: usize, f: fn(i64, i64) -> (i64, i64)| -> usize {
        let (c, d) = f(pts[i].c as i64, pts[i].d as i64);
        p1.index(c, d).expect("P¹ is stable under SL₂(Z)")
    };
    let sigma = |c: i64, d: i64| (d, -c);
    let tau = |c: i64, d: i64| (d, -c - d);

    // 2-term relations: each symbol becomes ± a free generator, or zero
    let mut two: Vec<Option<(usize, i64)>> = vec![None; mu];
    let mut gens = Vec::new();
    for i in 0..mu {
        let j = act(i, sigma);
        if j == i || i > j {
            continue;
        }
        two[i] = Some((gens.len(), 1));
        two[j] = Some((gens.len(), -1));
        gens.push(i);
    }

    // 3-term relations, one per τ-orbit
    let mut seen = vec![false; mu];
    let mut rows = Vec::new();
    for i in 0..mu {
        if seen[i] {
            continue;
        }
        let orbit = [i, act(i, tau), act(act(i, tau), tau)];
        let mut row = vec![Rational::zero(); gens.len()];
        for &k in &orbit {
            seen[k] = true;
        }
        let members: &[usize] = if orbit[1] == i { &orbit[..1] } else { &orbit };
        let weight = if orbit[1] == i { 3 } else { 1 };
        for &k in members {
            if let Some((g, s)) = two[k] {
                row[g] += Rational::from_integer((s * weight).into());
            }
        }
        if row.iter().any(|x| !x.is_zero()) {
            rows.push(row);
        }
    }
    let (rref, pivots) = if rows.is_empty() {
        (QMatrix::zeros(0, gens.len()), vec![])
    } else {
        QMatrix::from_rows(rows).expect("rectangular").rref()
    };
    let free: Vec<usize> = (0..gens.len()).filter(|c| !pivots.contains(c)).collect();
    let mut free_pos = vec![usize::MAX; gens.len()];
    for (k, &f) in free.iter().enumerate() {
        free_pos[f] = k;
    }
    // coordinates of each free generator
    let gen_coords: Vec<SparseVec> = (0..gens.len())
        .map(|g| {
            if free_pos[g] != usize::MAX {
                return vec![(free_pos[g], Rational::one())];
            }
            let row = pivots.iter().position(|&p| p == g).expect("pivot");
            free.iter()
                .enumerate()
                .filter(|(_, &f)| !rref[(row, f)].is_zero())
                .map(|(k, &f)| (k, -rref[(row, f)].clone()))
                .collect()
        })
        .collect();
    let coords: Vec<SparseVec> = two
        .iter()
        .map(|t| match t {
            None => vec![],
            Some((g, s)) => gen_coords[*g]
                .iter()
                .map(|(k, v)| (*k, if *s > 0 { v.clone() } else { -v.clone() }))
                .collect(),
        })
        .collect();
    let basis_syms: Vec<usize> = free.iter().map(|&f| gens[f]).collect();

    let mut space = ModSymSpace {
        level: n,
        p1,
        basis_syms,
        coords,
        cusps: Vec::new(),
        boundary: QMatrix::zeros(0, 0),
    };
    // every cusp class is g∞ for some coset, so this finds all of them
    let sym_boundaries: Vec<(usize, usize)> = (0..mu).map(|i| space.raw_boundary(i)).collect();
    let dim = space.basis_syms.len();
    let mut b = QMatrix::zeros(space.cusps.len(), dim);
    for (j, &s) in space.basis_syms.iter().enumerate() {
        let (plus, minus) = sym_boundaries[s];
        b[(plus, j)] += Rational::one();
        b[(minus, j)] -= Rational::one();
    }
    space.boundary = b;
    space
}

impl ModSymSpace {
    pub fn level(&self) -> Level {
        self.level
    }

    pub fn p1(&self) -> &P1List {
        &self.p1
    }

    pub fn dimension(&self) -> usize {
        self.basis_syms.len()
    }

    pub fn cusps(&self) -> &[Cusp] {
        &self.cusps
    }

    /// Boundary map from quotient coordinates to the free space on cusps.
    pub fn boundary(&self) -> &QMatrix {
        &self.boundary
    }

    /// Index of the Manin symbol standing for each basis vector.
    pub fn basis_symbols(&self) -> &[usize] {
        &self.basis_syms
    }

    pub fn symbol(&self, index: usize) -> ManinSymbol {
        ManinSymbol {
            point: self.p1.points()[index],
        }
    }

    /// Coordinates of the Manin symbol with P¹ index `index`.
    pub fn symbol_coords(&self, index: usize) -> &SparseVec {
        &self.coords[index]
    }

    /// Coordinates of `(c : d)`, or `None` off P¹(Z/N).
    pub fn coords_of(&self, c: i64, d: i64) -> Option<&SparseVec> {
        self.p1.index(c, d).map(|i| &self.coords[i])
    }

    pub fn dense(&self, v: &SparseVec) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.dimension()];
        for (k, x) in v {
            out[*k] += x;
        }
        out
    }

    fn cusp_index(&mut self, c: Cusp) -> usize {
        let n = self.level;
        if let Some(i) = self.cusps.iter().position(|x| x.equivalent(&c, n)) {
            return i;
        }
        self.cusps.push(c);
        self.cusps.len() - 1
    }

    fn find_cusp(&self, c: Cusp) -> usize {
        self.cusps
            .iter()
            .position(|x| x.equivalent(&c, self.level))
            .expect("all cusp classes are enumerated at construction")
    }

    /// `(class of g∞, class of g0)` for the symbol with index `i`.
    fn raw_boundary(&mut self, i: usize) -> (usize, usize) {
        let pt = self.p1.points()[i];
        let g = lift_to_sl2(pt.c as i64, pt.d as i64, self.level);
        let inf = self.cusp_index(Cusp::new(g[0][0], g[1][0]));
        let zero = self.cusp_index(Cusp::new(g[0][1], g[1][1]));
        (inf, zero)
    }

    /// Boundary `[g∞] − [g0]` of a Manin symbol as a vector on cusp classes.
    pub fn boundary_of(&self, sym: ManinSymbol) -> Vec<Rational> {
        let g = lift_to_sl2(sym.point.c as i64, sym.point.d as i64, self.level);
        let mut out = vec![Rational::zero(); self.cusps.len()];
        out[self.find_cusp(Cusp::new(g[0][0], g[1][0]))] += Rational::one();
        out[self.find_cusp(Cusp::new(g[0][1], g[1][1]))] -= Rational::one();
        out
    }

    /// Image of the basis under the right action of an integer matrix on
    /// Manin symbols, summed over a family: column `j` is `Σ_h e_j · h`.
    pub fn action_matrix(&self, family: &[[[i64; 2]; 2]]) -> QMatrix {
        let dim = self.dimension();
        let mut m = QMatrix::zeros(dim, dim);
        for (j, &s) in self.basis_syms.iter().enumerate() {
            for (k, count) in self.image_counts(s, family) {
                for (r, v) in &self.coords[k] {
                    m[(*r, j)] += v * Rational::from_integer(count.into());
                }
            }
        }
        m
    }

    /// Multiset of P¹ indices of `sym · h` over `h` in the family; images off
    /// P¹(Z/N) are dropped.
    pub fn image_counts(&self, sym: usize, family: &[[[i64; 2]; 2]]) -> Vec<(usize, i64)> {
        let pt = self.p1.points()[sym];
        let n = self.level.get() as i64;
        let (c, d) = (pt.c as i64, pt.d as i64);
        let mut counts = std::collections::BTreeMap::new();
        for h in family {
            let c2 = (c * h[0][0] % n + d * h[1][0] % n).rem_euclid(n);
            let d2 = (c * h[0][1] % n + d * h[1][1] % n).rem_euclid(n);
            if let Some(k) = self.p1.index(c2, d2) {
                *counts.entry(k).or_insert(0i64) += 1;
            }
        }
        counts.into_iter().collect()
    }

    /// The star involution `{α, β} ↦ {−α, −β}`, i.e. `(c : d) ↦ (−c : d)`.
    pub fn star_matrix(&self) -> QMatrix {
        self.action_matrix(&[[[-1, 0], [0, 1]]])
    }

    /// Coordinates of the modular symbol `{∞, a/c}` via continued-fraction
    /// convergents.
    pub fn infinity_to(&self, a: i64, c: i64) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.dimension()];
        for (sign_c, q, q_prev) in convergent_symbols(a, c) {
            if let Some(v) = self.coords_of(sign_c * q, q_prev) {
                for (k, x) in v {
                    out[*k] += x;
                }
            }
        }
        out
    }

    /// Coordinates of `{α, β}` for cusps `α = a1/c1` and `β = a2/c2`.
    pub fn symbol_between(&self, alpha: Cusp, beta: Cusp) -> Vec<Rational> {
        let b = self.infinity_to(beta.p, beta.q);
        let a = self.infinity_to(alpha.p, alpha.q);
        b.iter().zip(&a).map(|(x, y)| x - y).collect()
    }
}

/// `{∞, a/c} = Σ_k {p_{k−1}/q_{k−1}, p_k/q_k}` and each term is the Manin
/// symbol `((−1)^{k−1} q_k : q_{k−1})`. Returns `(sign, q_k, q_{k−1})`.
fn convergent_symbols(a: i64, c: i64) -> Vec<(i64, i64, i64)> {
    let cusp = Cusp::new(a, c);
    if cusp.q == 0 {
        return vec![];
    }
    let (mut num, mut den) = (cusp.p, cusp.q);
    let mut out = Vec::new();
    let (mut q_prev2, mut q_prev) = (1i64, 0i64);
    let mut k = 0;
    while den != 0 {
        let t = num.div_euclid(den);
        (num, den) = (den, num - t * den);
        let q = t * q_prev + q_prev2;
        let sign = if k % 2 == 0 { -1 } else { 1 };
        out.push((sign, q, q_prev));
        (q_prev2, q_prev) = (q_prev, q);
        k += 1;
    }
    out
}

/// Kernel of the boundary map: the cuspidal modular symbols.
#[derive(Clone, Debug)]
pub struct CuspidalSubspace {
    pub space: std::sync::Arc<ModSymSpace>,
    /// Columns span the kernel of the boundary map, in quotient coordinates.
    pub basis: QMatrix,
}

impl CuspidalSubspace {
    pub fn dimension(&self) -> usize {
        self.basis.cols()
    }

    pub fn level(&self) -> Level {
        self.space.level()
    }

    /// Restricts an operator on the ambient quotient to this subspace.
    pub fn restrict(&self, ambient: &QMatrix) -> QMatrix {
        let image = ambient * &self.basis;
        self.basis
            .coordinates_in_span(&image)
            .expect("the cuspidal subspace is Hecke stable")
    }

    /// Coordinates of an ambient vector lying in this subspace.
    pub fn coordinates(&self, v: &[Rational]) -> crate::Result<Vec<Rational>> {
        let col = QMatrix::from_columns(v.len(), &[v.to_vec()]);
        Ok(self.basis.coordinates_in_span(&col)?.column(0))
    }

    /// Star involution on cuspidal coordinates.
    pub fn star(&self) -> QMatrix {
        self.restrict(&self.space.star_matrix())
    }

    /// Basis (in cuspidal coordinates) of the +1 eigenspace of the star
    /// involution; it has dimension `g`.
    pub fn plus_basis(&self) -> QMatrix {
        let s = self.star();
        (&s - &QMatrix::identity(s.rows())).kernel()
    }
}

pub fn cuspidal_subspace(space: std::sync::Arc<ModSymSpace>) -> CuspidalSubspace {
    let basis = space.boundary().kernel();
    CuspidalSubspace { space, basis }
}
