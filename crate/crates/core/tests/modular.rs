//! Congruence data, modular symbols and Hecke operators against
//! independent computations.

use std::sync::Arc;

use modfol_core::algebra::{QMatrix, Rational, RealEmbedding};
use modfol_core::congruence::{curve_data, euler_phi, gcd, index_mu, p1_enumerate, Level};
use modfol_core::eigen::{apply_rational, decompose_auto};
use modfol_core::hecke::{hecke_matrix, hecke_matrix_n, hecke_qexp};
use modfol_core::modsym::{build_space, cuspidal_subspace};
use modfol_core::periods::eigenform_expansion;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn level(n: u64) -> Level {
    Level::new(n).unwrap()
}

#[test]
fn p1_size_matches_class_count() {
    for n in 2..=500u64 {
        let len = p1_enumerate(level(n)).len() as u64;
        assert_eq!(len, index_mu(level(n)), "N={n}");
        if n <= 120 {
            // pairs with gcd(c, d, N) = 1, up to units
            let pairs = (0..n)
                .flat_map(|c| (0..n).map(move |d| (c, d)))
                .filter(|&(c, d)| gcd(gcd(c as i64, d as i64), n as i64) == 1)
                .count() as u64;
            assert_eq!(len, pairs / euler_phi(n), "N={n}");
        }
    }
}

#[test]
fn genus_formula_is_integral() {
    for n in 2..=10_000u64 {
        let c = curve_data(level(n));
        let twelve_g =
            12 + c.index_mu as i64 - 3 * c.nu2 as i64 - 4 * c.nu3 as i64 - 6 * c.nu_inf as i64;
        assert!(twelve_g >= 0 && twelve_g % 12 == 0, "N={n}");
        assert_eq!(c.genus as i64, twelve_g / 12);
    }
}

#[test]
fn cuspidal_dimension_is_twice_genus() {
    for n in 2..=200u64 {
        let s = cuspidal_subspace(Arc::new(build_space(level(n))));
        assert_eq!(
            s.dimension() as u64,
            2 * curve_data(level(n)).genus,
            "N={n}"
        );
    }
}

/// Quotient dimension from the full relation matrix, with symbols taken in
/// a shuffled order.
fn relation_dimension(n: u64, rng: &mut ChaCha8Rng) -> usize {
    let pts = p1_enumerate(level(n));
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.shuffle(rng);
    let p1 = modfol_core::congruence::P1List::new(level(n));
    let col = |c: i64, d: i64| order[p1.index(c, d).unwrap()];
    let mut rows = Vec::new();
    for p in &pts {
        let (c, d) = (p.c as i64, p.d as i64);
        let mut r = vec![Rational::zero(); pts.len()];
        r[col(c, d)] += Rational::one();
        r[col(d, -c)] += Rational::one();
        rows.push(r);
        let mut r = vec![Rational::zero(); pts.len()];
        r[col(c, d)] += Rational::one();
        r[col(d, -c - d)] += Rational::one();
        r[col(-c - d, c)] += Rational::one();
        rows.push(r);
    }
    rows.shuffle(rng);
    pts.len() - QMatrix::from_rows(rows).unwrap().rank()
}

#[test]
fn relation_rank_ignores_symbol_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in [2u64, 6, 11, 12, 23, 25, 30] {
        let dim = build_space(level(n)).dimension();
        for _ in 0..3 {
            assert_eq!(relation_dimension(n, &mut rng), dim, "N={n}");
        }
    }
}

#[test]
fn cuspidal_vectors_have_zero_boundary() {
    for n in [11u64, 24, 37, 45, 64] {
        let space = Arc::new(build_space(level(n)));
        let s = cuspidal_subspace(space.clone());
        for j in 0..s.dimension() {
            let v = s.basis.column(j);
            let mut total = vec![Rational::zero(); space.cusps().len()];
            for (k, x) in v.iter().enumerate() {
                let b = space.boundary_of(space.symbol(space.basis_symbols()[k]));
                for (t, y) in total.iter_mut().zip(b) {
                    *t += x * y;
                }
            }
            assert!(total.iter().all(Zero::is_zero), "N={n}");
        }
    }
}

#[test]
fn hecke_operators_commute_away_from_level() {
    for n in [11u64, 30, 35, 42] {
        let s = cuspidal_subspace(Arc::new(build_space(level(n))));
        let ops: Vec<_> = (1..=12u64)
            .filter(|&m| gcd(m as i64, n as i64) == 1)
            .map(|m| hecke_matrix_n(m, &s).unwrap().matrix)
            .collect();
        for a in &ops {
            for b in &ops {
                assert!(a.commutes_with(b), "N={n}");
            }
        }
    }
}

#[test]
fn charpolys_are_squares_of_totally_real_polynomials() {
    for n in [11u64, 23, 29, 31, 37, 43, 67] {
        let s = cuspidal_subspace(Arc::new(build_space(level(n))));
        for p in [2u64, 3, 5, 7] {
            let chi = hecke_matrix(p, &s).unwrap().matrix.charpoly().unwrap();
            for (f, e) in chi.squarefree_decomposition() {
                assert_eq!(e % 2, 0, "N={n} p={p}");
                let real = modfol_core::algebra::sturm::SturmSequence::new(&f).count_real();
                assert_eq!(real, f.deg(), "N={n} p={p}");
            }
        }
    }
}

#[test]
fn matrix_eigenvalues_match_q_expansion() {
    for n in 11..=50u64 {
        let s = cuspidal_subspace(Arc::new(build_space(level(n))));
        if s.dimension() == 0 {
            continue;
        }
        for o in decompose_auto(&s)
            .unwrap()
            .iter()
            .filter(|o| !o.possibly_old)
        {
            let f = eigenform_expansion(o, &s.space, 40).unwrap();
            for p in [2u64, 3, 5, 7, 11, 13, 17, 19] {
                let t = hecke_matrix(p, &s).unwrap().matrix;
                let lambda = o.eigenvalue_of(&t).unwrap();
                let tf = hecke_qexp(p as usize, &f).unwrap();
                assert_eq!(*tf.coeff(1), lambda, "N={n} p={p}");
                assert_eq!(
                    apply_rational(&t, &o.eigenvector),
                    o.eigenvector
                        .iter()
                        .map(|x| x * &lambda)
                        .collect::<Vec<_>>()
                );
            }
        }
    }
}

#[test]
fn ramanujan_bound() {
    for n in [11u64, 23, 37, 43, 53, 61, 67, 73, 79, 83, 89, 97] {
        let s = cuspidal_subspace(Arc::new(build_space(level(n))));
        for o in decompose_auto(&s).unwrap() {
            let f = eigenform_expansion(&o, &s.space, 100).unwrap();
            for p in (2..=100u64).filter(|&p| modfol_core::congruence::is_prime(p) && n % p != 0) {
                let c = f.coeff(p as usize);
                // 4p − c_p² > 0 under every real embedding
                let gap =
                    &modfol_core::algebra::NFElement::from_i64(&o.field, 4 * p as i64) - &(c * c);
                for e in RealEmbedding::all(&o.field) {
                    assert!(e.is_positive(&gap), "N={n} p={p}: c_p = {c}");
                }
            }
        }
    }
}
