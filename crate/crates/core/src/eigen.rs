//! Galois orbits of Hecke eigenforms on the cuspidal space, their
//! eigenvalue fields, and eigenvectors rescaled into `K_f^n`.
//!
//! Decomposition happens on the +1 eigenspace of the star involution, where
//! each newform eigenvalue is simple, so the Kronecker-minor rescaling
//! applies. Eigenvectors are reported in full cuspidal coordinates.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::Arc;

use crate::algebra::numfield::nf_determinant;
use crate::algebra::{
    factor_poly, nf_solve, NFElement, NumberField, QMatrix, QPolynomial, RealEmbedding,
};
use crate::congruence::{primes, Level};
use crate::hecke::hecke_matrix;
use crate::modsym::CuspidalSubspace;
use crate::{Error, Result};

/// Auto-selected primes stop at the 25th prime.
pub const PRIME_CAP: u64 = 97;

/// One Galois orbit of normalized eigenforms.
#[derive(Clone, Debug)]
pub struct EigenformOrbit {
    pub level: Level,
    pub field: Arc<NumberField>,
    pub degree: usize,
    /// First prime whose Hecke eigenvalue generates the field.
    pub defining_prime: u64,
    /// `c_p` at the defining prime; the generator of the field.
    pub eigenvalue: NFElement,
    /// Eigenvector in cuspidal coordinates, first nonzero entry 1.
    pub eigenvector: Vec<NFElement>,
    /// Eigenvector in star-plus coordinates.
    pub plus_eigenvector: Vec<NFElement>,
    pub coefficient_map: BTreeMap<u64, NFElement>,
    /// Designated real embedding: the largest real root.
    pub embedding: RealEmbedding,
    /// Number of copies of this eigensystem in the star-plus space.
    pub multiplicity: usize,
    /// Set when the eigensystem repeats, as happens for oldforms.
    pub possibly_old: bool,
}

impl EigenformOrbit {
    /// `c_p` for a computed prime.
    pub fn coefficient(&self, p: u64) -> Option<&NFElement> {
        self.coefficient_map.get(&p)
    }

    /// The eigenvalue of `t` on the eigenvector; errors unless `t x = c x`
    /// holds exactly.
    pub fn eigenvalue_of(&self, t: &QMatrix) -> Result<NFElement> {
        eigenvalue_on(t, &self.eigenvector)
    }
}

/// `m x` for a rational matrix and a vector over a number field.
pub fn apply_rational(m: &QMatrix, x: &[NFElement]) -> Vec<NFElement> {
    let field = x[0].field().clone();
    (0..m.rows())
        .map(|i| {
            m.row(i)
                .iter()
                .zip(x)
                .fold(NFElement::zero(&field), |acc, (a, xi)| {
                    if num_traits::Zero::is_zero(a) {
                        acc
                    } else {
                        &acc + &xi.scale(a)
                    }
                })
        })
        .collect()
}

fn eigenvalue_on(t: &QMatrix, x: &[NFElement]) -> Result<NFElement> {
    let tx = apply_rational(t, x);
    let j = x
        .iter()
        .position(|v| !v.is_zero())
        .ok_or(Error::Domain("zero eigenvector".into()))?;
    let c = tx[j].div(&x[j])?;
    if tx.iter().zip(x).all(|(a, b)| *a == b * &c) {
        Ok(c)
    } else {
        Err(Error::Domain(
            "vector is not an eigenvector of the operator".into(),
        ))
    }
}

/// Number field generated by a root of a monic irreducible polynomial.
pub fn eigen_field(h: &QPolynomial) -> Result<Arc<NumberField>> {
    NumberField::new(h.clone())
}

/// Row echelon rank over a number field.
fn nf_rank(a: &[Vec<NFElement>]) -> usize {
    let mut m = a.to_vec();
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].inverse().expect("nonzero pivot");
        for i in r + 1..rows {
            if m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] * &inv;
            for j in c..cols {
                let v = &m[i][j] - &(&f * &m[r][j]);
                m[i][j] = v;
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

/// Kernel basis over a number field, in echelon normalization.
fn nf_kernel(a: &[Vec<NFElement>], field: &Arc<NumberField>, cols: usize) -> Vec<Vec<NFElement>> {
    let mut m = a.to_vec();
    let rows = m.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].inverse().expect("nonzero pivot");
        for j in c..cols {
            m[r][j] = &m[r][j] * &inv;
        }
        for i in 0..rows {
            if i == r || m[i][c].is_zero() {
                continue;
            }
            let f = m[i][c].clone();
            for j in c..cols {
                let v = &m[i][j] - &(&f * &m[r][j]);
                m[i][j] = v;
            }
        }
        pivots.push(c);
        r += 1;
    }
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|f| {
            let mut v = vec![NFElement::zero(field); cols];
            v[f] = NFElement::one(field);
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -&m[row][f];
            }
            v
        })
        .collect()
}

fn shifted(t: &QMatrix, lambda: &NFElement) -> Vec<Vec<NFElement>> {
    let field = lambda.field();
    (0..t.rows())
        .map(|i| {
            (0..t.cols())
                .map(|j| {
                    let a = NFElement::from_rational(field, t[(i, j)].clone());
                    if i == j {
                        &a - lambda
                    } else {
                        a
                    }
                })
                .collect()
        })
        .collect()
}

/// Eigenvector of a rational matrix for a simple eigenvalue `λ`, with
/// entries in `K = Q(λ)`: the first coordinate `j` that can be normalized
/// is set to 1, one row is cancelled, and the remaining square system with
/// nonzero determinant is solved exactly.
pub fn rescale_eigenvector(t: &QMatrix, lambda: &NFElement) -> Result<Vec<NFElement>> {
    if !t.is_square() {
        return Err(Error::Dimension(
            "eigenvector of a non-square matrix".into(),
        ));
    }
    let n = t.rows();
    let field = lambda.field();
    let a = shifted(t, lambda);
    let rank = nf_rank(&a);
    if rank == n {
        return Err(Error::Domain("λ is not an eigenvalue".into()));
    }
    if rank + 1 < n {
        return Err(Error::Multiplicity {
            rank,
            expected: n - 1,
        });
    }
    for j in 0..n {
        let cols: Vec<usize> = (0..n).filter(|&c| c != j).collect();
        for r in 0..n {
            let rows: Vec<usize> = (0..n).filter(|&i| i != r).collect();
            let minor: Vec<Vec<NFElement>> = rows
                .iter()
                .map(|&i| cols.iter().map(|&c| a[i][c].clone()).collect())
                .collect();
            if nf_determinant(&minor, field).is_zero() {
                continue;
            }
            let rhs: Vec<NFElement> = rows.iter().map(|&i| -&a[i][j]).collect();
            let rest = nf_solve(&minor, &rhs)?;
            let mut x = Vec::with_capacity(n);
            let mut it = rest.into_iter();
            for c in 0..n {
                x.push(if c == j {
                    NFElement::one(field)
                } else {
                    it.next().expect("n-1 values")
                });
            }
            return Ok(x);
        }
    }
    unreachable!("rank n-1 guarantees a nonzero minor")
}

/// A piece of the star-plus space: columns in plus coordinates.
struct Piece {
    basis: QMatrix,
    decided: Option<(u64, QPolynomial)>,
}

fn restrict(t: &QMatrix, basis: &QMatrix) -> QMatrix {
    basis
        .coordinates_in_span(&(t * basis))
        .expect("invariant subspace")
}

/// Splits the star-plus cuspidal space into Galois orbits using the given
/// primes (all coprime to N).
pub fn decompose(s: &CuspidalSubspace, primes: &[u64]) -> Result<Vec<EigenformOrbit>> {
    decompose_inner(s, primes, false)
}

/// As `decompose`, adding primes coprime to N in increasing order until the
/// orbits separate. Pieces still unsplit at the prime cap are reported with
/// their multiplicity and flagged possibly old.
pub fn decompose_auto(s: &CuspidalSubspace) -> Result<Vec<EigenformOrbit>> {
    decompose_inner(s, &[], true)
}

fn next_good_prime(after: u64, n: Level) -> u64 {
    primes()
        .find(|&p| p > after && !n.get().is_multiple_of(p))
        .expect("infinitely many primes")
}

fn decompose_inner(s: &CuspidalSubspace, given: &[u64], auto: bool) -> Result<Vec<EigenformOrbit>> {
    let level = s.level();
    if !auto && given.is_empty() {
        return Err(Error::Domain("decompose needs at least one prime".into()));
    }
    if let Some(&p) = given
        .iter()
        .find(|&&p| !crate::congruence::is_prime(p) || level.get().is_multiple_of(p))
    {
        return Err(Error::Domain(format!(
            "{p} is not a prime coprime to the level {level}"
        )));
    }
    let plus = s.plus_basis();
    let g = plus.cols();
    if g == 0 {
        return Ok(vec![]);
    }
    let mut used: Vec<u64> = Vec::new();
    let mut ops: BTreeMap<u64, (QMatrix, QMatrix)> = BTreeMap::new();
    let mut op = |p: u64| -> Result<(QMatrix, QMatrix)> {
        if let Some(m) = ops.get(&p) {
            return Ok(m.clone());
        }
        let full = hecke_matrix(p, s)?.matrix;
        let on_plus = restrict(&full, &plus);
        ops.insert(p, (full.clone(), on_plus.clone()));
        Ok((full, on_plus))
    };

    let mut pieces = vec![Piece {
        basis: QMatrix::identity(g),
        decided: None,
    }];
    let mut queue: Vec<u64> = given.to_vec();
    queue.sort_unstable();
    queue.dedup();
    let mut qi = 0;
    loop {
        if pieces.iter().all(|p| p.decided.is_some()) {
            break;
        }
        let p = if qi < queue.len() {
            queue[qi]
        } else if auto {
            let p = next_good_prime(used.last().copied().unwrap_or(1), level);
            if p > PRIME_CAP {
                break;
            }
            p
        } else {
            let last = *used.last().expect("nonempty");
            return Err(Error::UndecidedSplit {
                next_prime: next_good_prime(last, level),
            });
        };
        qi += 1;
        used.push(p);
        let tp = op(p)?.1;
        let mut next = Vec::new();
        for piece in pieces {
            if piece.decided.is_some() {
                next.push(piece);
                continue;
            }
            let t = restrict(&tp, &piece.basis);
            for (h, e) in factor_poly(&t.charpoly()?)? {
                let sub = t.eval_poly(&h)?.kernel();
                let basis = &piece.basis * &sub;
                let decided = (e == 1).then(|| (p, h.clone()));
                next.push(Piece { basis, decided });
            }
        }
        pieces = next;
    }
    if !auto {
        // also record coefficients at every supplied prime
        for &p in &queue {
            if !used.contains(&p) {
                used.push(p);
            }
        }
    }
    used.sort_unstable();

    let mut orbits = Vec::new();
    for piece in pieces {
        let k = piece.basis.cols();
        let (defining, h, multiplicity) = match piece.decided {
            Some((p, h)) => (p, h, 1),
            None => old_generator(&piece.basis, &used, &mut op)?,
        };
        let field = eigen_field(&h)?;
        let lambda = NFElement::generator(&field);
        let t = restrict(&op(defining)?.1, &piece.basis);
        let x = if multiplicity == 1 {
            rescale_eigenvector(&t, &lambda)?
        } else {
            let a = shifted(&t, &lambda);
            nf_kernel(&a, &field, k)
                .into_iter()
                .next()
                .ok_or(Error::Domain("empty eigenspace".into()))?
        };
        let plus_vec = normalize(apply_rational(&piece.basis, &x))?;
        let cusp_vec = normalize(apply_rational(&plus, &plus_vec))?;
        let mut coefficient_map = BTreeMap::new();
        for &p in &used {
            let full = op(p)?.0;
            coefficient_map.insert(p, eigenvalue_on(&full, &cusp_vec)?);
        }
        debug_assert_eq!(coefficient_map[&defining], lambda);
        orbits.push(EigenformOrbit {
            level,
            degree: field.degree(),
            embedding: RealEmbedding::largest(&field)?,
            field,
            defining_prime: defining,
            eigenvalue: lambda,
            eigenvector: cusp_vec,
            plus_eigenvector: plus_vec,
            coefficient_map,
            multiplicity,
            possibly_old: multiplicity > 1,
        });
    }
    orbits.sort_by(orbit_order);
    Ok(orbits)
}

/// For a piece whose eigensystem repeats: the first prime whose eigenvalue
/// has the largest degree, its minimal polynomial, and the multiplicity.
fn old_generator(
    basis: &QMatrix,
    used: &[u64],
    op: &mut impl FnMut(u64) -> Result<(QMatrix, QMatrix)>,
) -> Result<(u64, QPolynomial, usize)> {
    let mut best: Option<(u64, QPolynomial, usize)> = None;
    for &p in used {
        let t = restrict(&op(p)?.1, basis);
        let f = factor_poly(&t.charpoly()?)?;
        if f.len() != 1 {
            return Err(Error::Domain(
                "piece did not split into a single eigensystem".into(),
            ));
        }
        let (h, e) = f.into_iter().next().expect("one factor");
        if best.as_ref().is_none_or(|b| h.deg() > b.1.deg()) {
            best = Some((p, h, e));
        }
    }
    best.ok_or(Error::Domain("no primes available".into()))
}

fn normalize(v: Vec<NFElement>) -> Result<Vec<NFElement>> {
    let j = v
        .iter()
        .position(|x| !x.is_zero())
        .ok_or(Error::Domain("zero eigenvector".into()))?;
    let inv = v[j].inverse()?;
    Ok(v.iter().map(|x| x * &inv).collect())
}

fn orbit_order(a: &EigenformOrbit, b: &EigenformOrbit) -> Ordering {
    a.degree.cmp(&b.degree).then_with(|| {
        for (p, ca) in &a.coefficient_map {
            if let Some(cb) = b.coefficient_map.get(p) {
                let o = ca.trace().cmp(&cb.trace());
                if o != Ordering::Equal {
                    return o;
                }
            }
        }
        a.eigenvalue
            .minimal_polynomial()
            .canonical_cmp(&b.eigenvalue.minimal_polynomial())
            .then(a.defining_prime.cmp(&b.defining_prime))
    })
}
