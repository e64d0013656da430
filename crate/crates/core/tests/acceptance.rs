//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the process exits nonzero if any criterion fails.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use modfol_core::algebra::{
    factor_poly, rat, ratio, NFElement, NumberField, QMatrix, QPolynomial, Rational, RealEmbedding,
};
use modfol_core::congruence::{curve_data, is_prime, Level};
use modfol_core::eigen::{
    apply_rational, decompose_auto, eigen_field, rescale_eigenvector, EigenformOrbit,
};
use modfol_core::foliation::{
    basis_change, classify, classify_torus, module_rank, scale_module, FoliationKind,
    JacobianModule, TorusKind,
};
use modfol_core::hecke::{hecke_matrix, hecke_qexp, verify_commutativity};
use modfol_core::iet::{minimality_probe, periodicity_report, Iet};
use modfol_core::modsym::{build_space, cuspidal_subspace, CuspidalSubspace};
use modfol_core::periods::{
    detect_rank, eigenform_expansion, homology_generators, numeric_jacobian, order_for,
    NumericEigenform,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn level(n: u64) -> Level {
    Level::new(n).unwrap()
}

fn space(n: u64) -> CuspidalSubspace {
    cuspidal_subspace(Arc::new(build_space(level(n))))
}

fn primes_to(n: u64) -> impl Iterator<Item = u64> {
    (2..=n).filter(|&p| is_prime(p))
}

/// Genus of X₀(p) from the action of PSL₂(Z) on the cosets, identified with
/// P¹(F_p) under Möbius transformations (∞ encoded as p).
fn coset_genus(p: u64) -> i64 {
    let inf = p;
    let inv = |x: u64| (1..p).find(|y| x * y % p == 1).unwrap();
    let s = |x: u64| match x {
        _ if x == inf => 0,
        0 => inf,
        _ => (p - inv(x)) % p,
    };
    // x -> -1/(x+1)
    let u = |x: u64| match x {
        _ if x == inf => 0,
        _ if x == p - 1 => inf,
        _ => (p - inv(x + 1)) % p,
    };
    let t = |x: u64| if x == inf { inf } else { (x + 1) % p };
    let mu = (p + 1) as i64;
    let nu2 = (0..=p).filter(|&x| s(x) == x).count() as i64;
    let nu3 = (0..=p).filter(|&x| u(x) == x).count() as i64;
    let mut seen = vec![false; p as usize + 1];
    let mut cycles = 0;
    for x in 0..=p {
        if seen[x as usize] {
            continue;
        }
        cycles += 1;
        let mut y = x;
        while !seen[y as usize] {
            seen[y as usize] = true;
            y = t(y);
        }
    }
    let twelve_g = 12 + mu - 3 * nu2 - 4 * nu3 - 6 * cycles;
    assert_eq!(twelve_g % 12, 0);
    twelve_g / 12
}

fn criterion_1() -> Outcome {
    for p in primes_to(100) {
        let g = coset_genus(p);
        let c = curve_data(level(p));
        ensure(c.genus as i64 == g, || {
            format!("N={p}: genus {} vs coset count {g}", c.genus)
        })?;
        let s = space(p);
        ensure(s.dimension() as i64 == 2 * g, || {
            format!("N={p}: cuspidal dim {} vs 2g = {}", s.dimension(), 2 * g)
        })?;
    }
    for (n, g) in [(11, 1), (23, 2), (37, 2)] {
        ensure(curve_data(level(n)).genus == g, || format!("g({n}) != {g}"))?;
    }
    Ok("25 prime levels; g(11)=1, g(23)=2, g(37)=2".into())
}

/// `q ∏ (1 − qⁿ)² (1 − q¹¹ⁿ)²` to the given order.
fn eta_product_11(order: usize) -> Vec<i64> {
    let mut s = vec![0i64; order + 1];
    s[1] = 1;
    for n in 1..=order {
        for step in [n, n, 11 * n, 11 * n] {
            for m in (step..=order).rev() {
                s[m] -= s[m - step];
            }
        }
    }
    s
}

fn criterion_2() -> Outcome {
    let s = space(11);
    let orbits = decompose_auto(&s).map_err(|e| e.to_string())?;
    ensure(orbits.len() == 1, || {
        format!("{} orbits at level 11", orbits.len())
    })?;
    let f = eigenform_expansion(&orbits[0], &s.space, 50).map_err(|e| e.to_string())?;
    let eta = eta_product_11(50);
    for m in 1..=50 {
        ensure(f.coeff(m).as_rational() == Some(rat(eta[m])), || {
            format!("c_{m} = {} vs {}", f.coeff(m), eta[m])
        })?;
    }
    for n in 1..=10 {
        let tf = hecke_qexp(n, &f).map_err(|e| e.to_string())?;
        let cn = f.coeff(n);
        for m in 1..=tf.truncation_order() {
            ensure(*tf.coeff(m) == cn * f.coeff(m), || {
                format!("T_{n} f differs from c_{n} f at q^{m}")
            })?;
        }
    }
    Ok("50 coefficients match the eta product; T_n f = c_n f for n <= 10".into())
}

fn criterion_3() -> Outcome {
    for n in [11, 23, 37, 67] {
        let s = space(n);
        let ops = primes_to(13)
            .map(|p| hecke_matrix(p, &s))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| e.to_string())?;
        ensure(
            verify_commutativity(&ops).map_err(|e| e.to_string())?,
            || format!("N={n}: Hecke operators do not commute"),
        )?;
        for o in decompose_auto(&s).map_err(|e| e.to_string())? {
            let real = RealEmbedding::all(&o.field).len();
            ensure(real == o.degree, || {
                format!(
                    "N={n}: field {} has {real} real roots",
                    o.field.minimal_polynomial()
                )
            })?;
        }
    }
    Ok("T_p, p <= 13, commute and every eigenvalue field is totally real".into())
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut tested = 0;
    let mut factors = 0;
    while tested < 500 {
        let n = rng.gen_range(1..=6);
        let rows: Vec<Vec<Rational>> = (0..n)
            .map(|_| (0..n).map(|_| rat(rng.gen_range(-5..=5))).collect())
            .collect();
        let t = QMatrix::from_rows(rows).unwrap();
        let chi = t.charpoly().map_err(|e| e.to_string())?;
        let simple: Vec<QPolynomial> = factor_poly(&chi)
            .map_err(|e| e.to_string())?
            .into_iter()
            .filter(|(_, e)| *e == 1)
            .map(|(h, _)| h)
            .collect();
        if simple.is_empty() {
            continue;
        }
        tested += 1;
        for h in simple {
            let field = eigen_field(&h).map_err(|e| e.to_string())?;
            let lambda = NFElement::generator(&field);
            let x = rescale_eigenvector(&t, &lambda).map_err(|e| format!("{t:?}: {e}"))?;
            ensure(x.iter().any(|c| !c.is_zero()), || {
                format!("{t:?}: zero eigenvector")
            })?;
            let tx = apply_rational(&t, &x);
            ensure(tx.iter().zip(&x).all(|(a, b)| *a == &lambda * b), || {
                format!("{t:?}: T x != λ x for {h}")
            })?;
            factors += 1;
        }
    }
    Ok(format!(
        "500 matrices, {factors} simple factors, T x = λ x exactly"
    ))
}

fn random_unimodular(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<i64>> {
    let mut a: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| (i == j) as i64).collect())
        .collect();
    for _ in 0..rng.gen_range(0..8) {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        match rng.gen_range(0..3) {
            0 if i != j => {
                let k = rng.gen_range(-2..=2);
                for c in 0..n {
                    a[i][c] += k * a[j][c];
                }
            }
            1 => a.swap(i, j),
            _ => a[i].iter_mut().for_each(|x| *x = -*x),
        }
    }
    a
}

fn criterion_5() -> Outcome {
    let fields = [
        NumberField::rationals(),
        NumberField::new(QPolynomial::from_i64(&[-2, 0, 1])).unwrap(),
        NumberField::new(QPolynomial::from_i64(&[-1, -1, 1])).unwrap(),
        NumberField::new(QPolynomial::from_i64(&[-2, 0, 0, 1])).unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let random_element = |rng: &mut ChaCha8Rng, k: &Arc<NumberField>| {
        let coords = (0..k.degree())
            .map(|_| ratio(rng.gen_range(-6..=6), rng.gen_range(1..=4)))
            .collect();
        NFElement::new(k, coords).unwrap()
    };
    for _ in 0..1000 {
        let k = &fields[rng.gen_range(0..fields.len())];
        let n = rng.gen_range(1..=4);
        let gens: Vec<NFElement> = (0..n).map(|_| random_element(&mut rng, k)).collect();
        let j = JacobianModule::new(k, gens).unwrap();
        let lattice = j.canonical_lattice();
        let a = random_unimodular(&mut rng, n);
        let changed = basis_change(&j, &a).map_err(|e| e.to_string())?;
        ensure(changed.canonical_lattice() == lattice, || {
            format!("basis change {a:?} moved the lattice")
        })?;
        let mu = loop {
            let m = random_element(&mut rng, k);
            if !m.is_zero() {
                break m;
            }
        };
        // μL from the canonical basis of L
        let basis: Vec<NFElement> = lattice
            .iter()
            .map(|r| &NFElement::new(k, r.clone()).unwrap() * &mu)
            .collect();
        let expected = JacobianModule::new(k, basis).unwrap().canonical_lattice();
        let scaled = scale_module(&j, &mu).map_err(|e| e.to_string())?;
        ensure(scaled.canonical_lattice() == expected, || {
            format!("scaling by {mu} does not scale the lattice")
        })?;
    }
    Ok("1000 random modules: lattice invariant under unimodular change and scales by μ".into())
}

fn orbits_at(n: u64) -> Result<Vec<EigenformOrbit>, String> {
    decompose_auto(&space(n)).map_err(|e| e.to_string())
}

fn criterion_6() -> Outcome {
    let mut count = 0;
    for p in primes_to(100) {
        for o in orbits_at(p)? {
            let r = module_rank(&JacobianModule::of_orbit(&o));
            ensure(r == o.degree, || {
                format!("N={p}: rank {r} for degree {}", o.degree)
            })?;
            count += 1;
        }
    }
    Ok(format!(
        "{count} orbits at prime levels <= 100 have module rank = degree"
    ))
}

fn criterion_7() -> Outcome {
    let digits = 60;
    let mut detail = Vec::new();
    for n in [11, 23, 37] {
        let start = Instant::now();
        let s = space(n);
        let orbits = decompose_auto(&s).map_err(|e| e.to_string())?;
        let basis = homology_generators(&s);
        let order = order_for(&basis.gammas, digits);
        for (i, o) in orbits.iter().enumerate() {
            let f =
                NumericEigenform::new(o, i, &s.space, order, digits).map_err(|e| e.to_string())?;
            let pv = numeric_jacobian(&f, &basis.gammas, digits).map_err(|e| e.to_string())?;
            let report = detect_rank(&pv.values, digits).map_err(|e| format!("N={n}: {e}"))?;
            let exact = module_rank(&JacobianModule::of_orbit(o));
            ensure(report.rank == exact, || {
                format!("N={n} orbit {i}: numeric rank {} vs {exact}", report.rank)
            })?;
            ensure(report.max_residual_log10 < -30.0, || {
                format!(
                    "N={n} orbit {i}: residual 1e{:.1}",
                    report.max_residual_log10
                )
            })?;
        }
        let took = start.elapsed();
        ensure(took < Duration::from_secs(120), || {
            format!("N={n} took {took:?}")
        })?;
        detail.push(format!("N={n} {:.2}s", took.as_secs_f64()));
    }
    Ok(format!(
        "numeric rank = exact rank at 60 digits ({})",
        detail.join(", ")
    ))
}

fn criterion_8() -> Outcome {
    let kinds = |n: u64| -> Result<Vec<FoliationKind>, String> {
        let c = curve_data(level(n));
        orbits_at(n)?
            .iter()
            .map(|o| classify(o, &c).map(|f| f.kind).map_err(|e| e.to_string()))
            .collect()
    };
    ensure(kinds(11)? == vec![FoliationKind::Strebel], || {
        "N=11 is not Strebel".into()
    })?;
    ensure(kinds(37)? == vec![FoliationKind::Strebel; 2], || {
        "N=37 orbits are not both Strebel".into()
    })?;
    ensure(kinds(23)? == vec![FoliationKind::PseudoAnosov], || {
        "N=23 is not pseudo-Anosov".into()
    })?;
    let mut total = 0;
    for p in primes_to(100) {
        let c = curve_data(level(p));
        if c.genus == 0 {
            continue;
        }
        let orbits = orbits_at(p)?;
        ensure(
            orbits.iter().map(|o| o.degree as u64).sum::<u64>() == c.genus,
            || format!("N={p}: degrees do not sum to g"),
        )?;
        for o in &orbits {
            let k = classify(o, &c).map_err(|e| e.to_string())?.kind;
            let matches = [
                o.degree == 1,
                o.degree > 1 && o.degree as u64 == c.genus,
                o.degree > 1 && (o.degree as u64) < c.genus,
            ];
            ensure(matches.iter().filter(|&&m| m).count() == 1, || {
                format!("N={p}: ambiguous degree {}", o.degree)
            })?;
            let expected = [
                FoliationKind::Strebel,
                FoliationKind::PseudoAnosov,
                FoliationKind::DegeneratePseudoAnosov,
            ][matches.iter().position(|&m| m).unwrap()];
            ensure(k == expected, || {
                format!("N={p}: {k:?} for degree {} and genus {}", o.degree, c.genus)
            })?;
            total += 1;
        }
    }
    Ok(format!(
        "fixtures hold; {total} orbits at prime levels <= 100 each get one class"
    ))
}

fn mat_mul(a: [[i128; 2]; 2], b: [[i128; 2]; 2]) -> [[i128; 2]; 2] {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

fn criterion_9() -> Outcome {
    let mut count = 0;
    let r = -3..=3i64;
    for a in r.clone() {
        for b in r.clone() {
            for c in r.clone() {
                for d in r.clone() {
                    if a * d - b * c != 1 {
                        continue;
                    }
                    let m = [[a as i128, b as i128], [c as i128, d as i128]];
                    let mut p = [[1, 0], [0, 1]];
                    for _ in 0..12 {
                        p = mat_mul(p, m);
                    }
                    let finite = p == [[1, 0], [0, 1]];
                    let kind = classify_torus(&[[a, b], [c, d]])
                        .map_err(|e| e.to_string())?
                        .kind;
                    ensure(finite == (kind == TorusKind::FiniteOrder), || {
                        format!("[[{a},{b}],[{c},{d}]]: {kind:?}")
                    })?;
                    count += 1;
                }
            }
        }
    }
    Ok(format!("{count} det-1 matrices: FiniteOrder iff A^12 = I"))
}

/// Irreducible permutations of `0..k`, zero-based images.
fn irreducible_permutations(k: usize) -> Vec<Vec<usize>> {
    fn perms(k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in perms(k - 1) {
            for pos in 0..k {
                let mut q = p.clone();
                q.insert(pos, k - 1);
                out.push(q);
            }
        }
        out
    }
    perms(k)
        .into_iter()
        .filter(|p| {
            (1..k).all(|j| p[..j].iter().copied().collect::<BTreeSet<_>>() != (0..j).collect())
        })
        .collect()
}

fn criterion_10() -> Outcome {
    let mut count = 0u64;
    let mut orbit_checked = 0u64;
    for k in 1..=4 {
        let perms = irreducible_permutations(k);
        for q in 1..=12i64 {
            let numerators: Vec<i64> = if q == 1 { vec![1] } else { (1..q).collect() };
            let mut tuple = vec![0usize; k];
            loop {
                let lengths: Vec<Rational> =
                    tuple.iter().map(|&i| ratio(numerators[i], q)).collect();
                for p in &perms {
                    let t = Iet::rational(&lengths, p.clone()).map_err(|e| e.to_string())?;
                    let r = periodicity_report(&t).map_err(|e| e.to_string())?;
                    ensure(r.periodic, || format!("{lengths:?} {p:?} not periodic"))?;
                    count += 1;
                    // replay a sample of orbits exactly: every point returns after period_lcm steps
                    if count.is_multiple_of(61) {
                        let period: u64 = r.period_lcm.to_string().parse().unwrap();
                        for x in t.top_starts() {
                            let mut y = x.clone();
                            for _ in 0..period {
                                y = t.apply(&y).map_err(|e| e.to_string())?;
                            }
                            ensure(y == x, || {
                                format!("{lengths:?} {p:?}: orbit of {x} does not close")
                            })?;
                        }
                        orbit_checked += 1;
                    }
                }
                // next tuple
                let mut i = 0;
                while i < k {
                    tuple[i] += 1;
                    if tuple[i] < numerators.len() {
                        break;
                    }
                    tuple[i] = 0;
                    i += 1;
                }
                if i == k {
                    break;
                }
            }
        }
    }
    let phi_field = NumberField::new(QPolynomial::from_i64(&[-1, -1, 1])).unwrap();
    let emb = RealEmbedding::largest(&phi_field).unwrap();
    let golden = Iet::new(
        vec![NFElement::one(&phi_field), NFElement::generator(&phi_field)],
        vec![1, 0],
        emb,
    )
    .unwrap();
    let m = minimality_probe(&golden, 100_000).map_err(|e| e.to_string())?;
    ensure(m.keane_violations == 0 && m.no_periodic_orbit_found, || {
        format!("golden IET: {m:?}")
    })?;
    Ok(format!(
        "{count} rational IETs periodic ({orbit_checked} replayed exactly); golden 2-IET: 0 violations in 1e5 steps"
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("genus and cuspidal dimension at prime levels", criterion_1),
        (
            "level 11 eigenform and Hecke action on q-expansions",
            criterion_2,
        ),
        ("Hecke commutativity and totally real fields", criterion_3),
        ("exact eigenvectors of random integer matrices", criterion_4),
        ("lattice invariance and scaling", criterion_5),
        ("module rank equals field degree", criterion_6),
        ("numeric period rank at 60 digits", criterion_7),
        ("foliation classification", criterion_8),
        ("torus trichotomy", criterion_9),
        ("interval exchange dichotomy", criterion_10),
    ];
    let only: Option<usize> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        if only.is_some_and(|o| o != i + 1) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or(e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default())
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {:2}: {name}: {detail} [{secs:.1}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {:2}: {name}: {why} [{secs:.1}s]", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
