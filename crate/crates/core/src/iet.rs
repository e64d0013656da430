//! Interval exchange transformations with exact lengths.
//!
//! Lengths are field elements compared through a designated real embedding.
//! Interval `i` (in top order) lands at position `perm[i]` of the image.

use std::cmp::Ordering;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use crate::algebra::{NFElement, NumberField, Rational, RealEmbedding};
use crate::foliation::{module_rank, JacobianModule};
use crate::{Error, Result};

/// Unit cells allowed when certifying periodicity.
pub const CELL_LIMIT: u64 = 50_000_000;

#[derive(Clone, Debug)]
pub struct Iet {
    lengths: Vec<NFElement>,
    perm: Vec<usize>,
    embedding: RealEmbedding,
}

fn is_irreducible(perm: &[usize]) -> bool {
    let mut max = 0;
    for (j, &p) in perm.iter().enumerate().take(perm.len() - 1) {
        max = max.max(p);
        if max == j {
            return false;
        }
    }
    true
}

impl Iet {
    /// `perm` is zero-based: `perm[i]` is the image position of interval `i`.
    pub fn new(
        lengths: Vec<NFElement>,
        perm: Vec<usize>,
        embedding: RealEmbedding,
    ) -> Result<Self> {
        let k = lengths.len();
        if k == 0 || perm.len() != k {
            return Err(Error::Dimension(format!(
                "{k} lengths with a permutation of size {}",
                perm.len()
            )));
        }
        let mut seen = vec![false; k];
        for &p in &perm {
            if p >= k || std::mem::replace(&mut seen[p], true) {
                return Err(Error::Domain(format!("{perm:?} is not a permutation")));
            }
        }
        if !is_irreducible(&perm) {
            return Err(Error::Domain(format!("permutation {perm:?} is reducible")));
        }
        if lengths
            .iter()
            .any(|l| !Arc::ptr_eq(l.field(), embedding.field()) && l.field() != embedding.field())
        {
            return Err(Error::Domain("lengths live in a different field".into()));
        }
        if lengths.iter().any(|l| !embedding.is_positive(l)) {
            return Err(Error::Domain("lengths must be positive".into()));
        }
        Ok(Self {
            lengths,
            perm,
            embedding,
        })
    }

    /// An IET with rational lengths.
    pub fn rational(lengths: &[Rational], perm: Vec<usize>) -> Result<Self> {
        static EMB: OnceLock<RealEmbedding> = OnceLock::new();
        let emb = EMB
            .get_or_init(|| RealEmbedding::largest(&NumberField::rationals()).expect("Q embeds"))
            .clone();
        let q = emb.field().clone();
        Self::new(
            lengths
                .iter()
                .map(|x| NFElement::from_rational(&q, x.clone()))
                .collect(),
            perm,
            emb,
        )
    }

    /// Builds from a one-based permutation such as `[3, 1, 2]`.
    pub fn from_one_based(
        lengths: Vec<NFElement>,
        perm: &[usize],
        embedding: RealEmbedding,
    ) -> Result<Self> {
        if perm.contains(&0) {
            return Err(Error::Domain("permutation entries start at 1".into()));
        }
        Self::new(lengths, perm.iter().map(|p| p - 1).collect(), embedding)
    }

    pub fn lengths(&self) -> &[NFElement] {
        &self.lengths
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    pub fn embedding(&self) -> &RealEmbedding {
        &self.embedding
    }

    pub fn field(&self) -> &Arc<NumberField> {
        self.embedding.field()
    }

    pub fn total(&self) -> NFElement {
        self.lengths
            .iter()
            .fold(NFElement::zero(self.field()), |a, l| &a + l)
    }

    /// Left endpoints of the intervals before the exchange.
    pub fn top_starts(&self) -> Vec<NFElement> {
        let mut acc = NFElement::zero(self.field());
        self.lengths
            .iter()
            .map(|l| {
                let s = acc.clone();
                acc = &acc + l;
                s
            })
            .collect()
    }

    /// Left endpoints of the intervals after the exchange, indexed by interval.
    pub fn bottom_starts(&self) -> Vec<NFElement> {
        let k = self.lengths.len();
        let mut order = vec![0; k];
        for (i, &p) in self.perm.iter().enumerate() {
            order[p] = i;
        }
        let mut out = vec![NFElement::zero(self.field()); k];
        let mut acc = NFElement::zero(self.field());
        for i in order {
            out[i] = acc.clone();
            acc = &acc + &self.lengths[i];
        }
        out
    }

    fn locate(
        &self,
        starts: &[NFElement],
        order: impl Iterator<Item = usize>,
        x: &NFElement,
    ) -> Result<usize> {
        if self.embedding.sign(x) == Ordering::Less {
            return Err(Error::Domain("point lies left of the interval".into()));
        }
        for i in order {
            let end = &starts[i] + &self.lengths[i];
            if self.embedding.cmp(x, &end) == Ordering::Less {
                return Ok(i);
            }
        }
        Err(Error::Domain("point lies right of the interval".into()))
    }

    /// Image of a point of `[0, total)`.
    pub fn apply(&self, x: &NFElement) -> Result<NFElement> {
        let (top, bottom) = (self.top_starts(), self.bottom_starts());
        self.apply_with(&top, &bottom, x)
    }

    fn apply_with(
        &self,
        top: &[NFElement],
        bottom: &[NFElement],
        x: &NFElement,
    ) -> Result<NFElement> {
        let i = self.locate(top, 0..self.lengths.len(), x)?;
        Ok(&(x - &top[i]) + &bottom[i])
    }

    /// Preimage of a point of `[0, total)`.
    pub fn apply_inverse(&self, y: &NFElement) -> Result<NFElement> {
        let (top, bottom) = (self.top_starts(), self.bottom_starts());
        let mut order = vec![0; self.perm.len()];
        for (i, &p) in self.perm.iter().enumerate() {
            order[p] = i;
        }
        let i = self.locate(&bottom, order.into_iter(), y)?;
        Ok(&(y - &bottom[i]) + &top[i])
    }
}

/// Free-function form of [`Iet::apply`].
pub fn iet_apply(t: &Iet, x: &NFElement) -> Result<NFElement> {
    t.apply(x)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicityReport {
    pub periodic: bool,
    pub period_lcm: BigInt,
    /// Number of unit cells after clearing denominators.
    pub cells: u64,
    pub cycle_lengths: Vec<u64>,
}

/// Certifies that every point of a rational IET is periodic by exhibiting
/// the IET as a permutation of unit cells.
pub fn periodicity_report(t: &Iet) -> Result<PeriodicityReport> {
    let q: Vec<Rational> = t
        .lengths
        .iter()
        .map(|l| {
            l.as_rational().ok_or_else(|| {
                Error::WrongCase("irrational length; use the minimality probe".into())
            })
        })
        .collect::<Result<_>>()?;
    let den = q.iter().fold(BigInt::one(), |a, x| a.lcm(x.denom()));
    let ints: Vec<u64> = q
        .iter()
        .map(|x| {
            (x * Rational::from_integer(den.clone()))
                .to_integer()
                .to_u64()
        })
        .collect::<Option<_>>()
        .ok_or_else(|| Error::Domain("lengths too large".into()))?;
    let cells: u64 = ints.iter().sum();
    if cells > CELL_LIMIT {
        return Err(Error::Domain(format!(
            "{cells} unit cells exceed the limit of {CELL_LIMIT}"
        )));
    }
    let k = ints.len();
    let mut top = vec![0u64; k];
    for i in 1..k {
        top[i] = top[i - 1] + ints[i - 1];
    }
    let mut order = vec![0; k];
    for (i, &p) in t.perm.iter().enumerate() {
        order[p] = i;
    }
    let mut bottom = vec![0u64; k];
    let mut acc = 0;
    for i in order {
        bottom[i] = acc;
        acc += ints[i];
    }
    let mut image = Vec::with_capacity(cells as usize);
    for i in 0..k {
        image.extend((0..ints[i]).map(|c| bottom[i] + c));
    }
    let mut seen = vec![false; cells as usize];
    let mut cycle_lengths = Vec::new();
    let mut lcm = BigInt::one();
    for start in 0..cells as usize {
        if seen[start] {
            continue;
        }
        let mut len = 0u64;
        let mut c = start;
        while !seen[c] {
            seen[c] = true;
            c = image[c] as usize;
            len += 1;
        }
        lcm = lcm.lcm(&BigInt::from(len));
        cycle_lengths.push(len);
    }
    Ok(PeriodicityReport {
        periodic: true,
        period_lcm: lcm,
        cells,
        cycle_lengths,
    })
}

/// A discontinuity whose forward orbit reached another discontinuity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Connection {
    pub from: usize,
    pub to: usize,
    pub steps: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinimalityReport {
    pub no_periodic_orbit_found: bool,
    pub keane_violations: usize,
    pub connections: Vec<Connection>,
    pub steps: usize,
}

/// Follows the forward orbits of the interior discontinuities for up to
/// `max_steps` steps and records every exact hit on a discontinuity.
pub fn minimality_probe(t: &Iet, max_steps: usize) -> Result<MinimalityReport> {
    let rank = module_rank(&JacobianModule::new(t.field(), t.lengths.clone())?);
    if rank < 2 {
        return Err(Error::WrongCase(format!(
            "lengths span a module of rank {rank}; use the periodicity report"
        )));
    }
    let (top, bottom) = (t.top_starts(), t.bottom_starts());
    let breaks = &top[1..];
    let mut connections = Vec::new();
    let mut periodic = false;
    for (from, b) in breaks.iter().enumerate() {
        let mut x = b.clone();
        for step in 1..=max_steps {
            x = t.apply_with(&top, &bottom, &x)?;
            if let Some(to) = breaks.iter().position(|y| *y == x) {
                periodic |= to == from;
                connections.push(Connection {
                    from: from + 1,
                    to: to + 1,
                    steps: step,
                });
                break;
            }
        }
    }
    Ok(MinimalityReport {
        no_periodic_orbit_found: !periodic,
        keane_violations: connections.len(),
        connections,
        steps: max_steps,
    })
}

/// One step of Rauzy induction on the last top and last bottom intervals.
pub fn rauzy_step(t: &Iet) -> Result<Iet> {
    let k = t.lengths.len();
    if k < 2 {
        return Err(Error::Domain(
            "Rauzy induction needs at least two intervals".into(),
        ));
    }
    let mut top: Vec<usize> = (0..k).collect();
    let mut bottom = vec![0; k];
    for (i, &p) in t.perm.iter().enumerate() {
        bottom[p] = i;
    }
    let alpha = top[k - 1];
    let beta = bottom[k - 1];
    let mut lengths = t.lengths.clone();
    match t.embedding.cmp(&lengths[alpha], &lengths[beta]) {
        Ordering::Equal => return Err(Error::DegenerateStep),
        Ordering::Greater => {
            lengths[alpha] = &lengths[alpha] - &lengths[beta];
            bottom.pop();
            let at = bottom
                .iter()
                .position(|&i| i == alpha)
                .expect("alpha in bottom row");
            bottom.insert(at + 1, beta);
        }
        Ordering::Less => {
            lengths[beta] = &lengths[beta] - &lengths[alpha];
            top.pop();
            let at = top
                .iter()
                .position(|&i| i == beta)
                .expect("beta in top row");
            top.insert(at + 1, alpha);
        }
    }
    // relabel intervals by their new top position
    let mut perm = vec![0; k];
    for (pos, &i) in bottom.iter().enumerate() {
        let new_label = top.iter().position(|&j| j == i).expect("same labels");
        perm[new_label] = pos;
    }
    let lengths = top.iter().map(|&i| lengths[i].clone()).collect();
    Iet::new(lengths, perm, t.embedding.clone())
}

/// Parses `p/q` or a polynomial expression in `w` into the given field.
pub fn parse_length(s: &str, field: &Arc<NumberField>) -> Result<NFElement> {
    let poly = crate::algebra::QPolynomial::parse(s.trim(), "w")?;
    Ok(NFElement::from_poly(field, &poly))
}
