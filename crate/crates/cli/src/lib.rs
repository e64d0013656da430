//! The `modfol` command line: JSON in, JSON out, with a per-level cache.
//!
//! Exit codes: 0 success, 2 usage error, 3 computation error,
//! 4 precision-indeterminate.

pub mod cache;
pub mod pretty;
pub mod records;

use std::ffi::OsString;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use modfol_core::algebra::{NFElement, NumberField, QPolynomial, RealEmbedding};
use modfol_core::congruence::{curve_data, Level};
use modfol_core::eigen::{decompose, decompose_auto, EigenformOrbit};
use modfol_core::foliation::{classify, classify_torus, module_rank, JacobianModule};
use modfol_core::hecke::hecke_matrix;
use modfol_core::iet::{minimality_probe, parse_length, periodicity_report, Iet};
use modfol_core::modsym::{build_space, cuspidal_subspace, CuspidalSubspace};
use modfol_core::periods::{
    detect_rank, homology_generators, numeric_jacobian, order_for, NumericEigenform,
};
use modfol_core::Error;

use cache::Cache;
use records::{ClassRecord, CurveRecord, DecomposeOutput, HeckeRecord, LevelRecord, OrbitRecord};

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_COMPUTATION: i32 = 3;
pub const EXIT_PRECISION: i32 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "modfol",
    version,
    about = "Classify measured foliations attached to eigenforms on X0(N)"
)]
struct Cli {
    /// Print human-readable tables instead of JSON.
    #[arg(long, global = true)]
    pretty: bool,
    /// Neither read nor write the level cache.
    #[arg(long, global = true)]
    no_cache: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Levels {
    /// Level N.
    n: Option<u64>,
    /// Inclusive batch of levels `A..B`, processed in parallel.
    #[arg(long, conflicts_with = "n")]
    range: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Index, elliptic points, cusps and genus of X0(N).
    Genus(Levels),
    /// Galois orbits of newforms with their eigenvalue fields.
    Decompose {
        #[command(flatten)]
        levels: Levels,
        /// Primes whose Hecke operators split the space, e.g. `2,3,5`.
        #[arg(long, value_delimiter = ',')]
        primes: Option<Vec<u64>>,
    },
    /// Strebel, pseudo-Anosov or degenerate pseudo-Anosov, per orbit.
    Classify {
        #[command(flatten)]
        levels: Levels,
        /// Zero-based orbit index.
        #[arg(long)]
        orbit: Option<usize>,
    },
    /// Real periods over a homology basis and the rank they generate.
    Periods {
        /// Level N.
        n: u64,
        /// Zero-based orbit index.
        #[arg(long, default_value_t = 0)]
        orbit: usize,
        /// Working precision in decimal digits (at least 40).
        #[arg(long, default_value_t = 60)]
        prec: u32,
    },
    /// Interval exchange: periodicity for rational lengths, a Keane probe otherwise.
    Iet {
        /// Lengths such as `1/2,1/3,1/6` or `1,w` with `--field`.
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        lengths: Vec<String>,
        /// One-based image positions, e.g. `3,1,2`.
        #[arg(long, value_delimiter = ',', required = true)]
        perm: Vec<usize>,
        /// Orbit steps for the Keane probe.
        #[arg(long, default_value_t = 10_000)]
        steps: usize,
        /// Defining polynomial of the length field in `w`, e.g. `w^2-w-1`.
        #[arg(long)]
        field: Option<String>,
        /// Real root of the defining polynomial to embed by, counted from the
        /// smallest; defaults to the largest.
        #[arg(long)]
        root: Option<usize>,
    },
    /// Finite order, parabolic or Anosov automorphism of the torus.
    Torus {
        /// Entries `a,b,c,d` of `[[a,b],[c,d]]`.
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        matrix: Vec<i64>,
    },
}

/// An error with its exit code, printed as `{"error", "hint"}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub code: i32,
    pub error: String,
    pub hint: String,
}

impl Failure {
    fn usage(error: impl Into<String>, hint: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            error: error.into(),
            hint: hint.into(),
        }
    }

    fn to_json(&self) -> Value {
        json!({ "error": self.error, "hint": self.hint })
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (code, hint) = match &e {
            Error::UndecidedSplit { next_prime } => (
                EXIT_COMPUTATION,
                format!("add prime {next_prime} to --primes, or omit --primes"),
            ),
            Error::NoCuspForms(_) => (EXIT_COMPUTATION, "X0(N) has genus 0".to_string()),
            Error::Precision(_) | Error::Indeterminate { .. } => {
                (EXIT_PRECISION, "raise --prec".to_string())
            }
            Error::Parse(_) => (EXIT_USAGE, "check the argument syntax".to_string()),
            Error::WrongCase(_) => (
                EXIT_COMPUTATION,
                "rational lengths are certified periodic; irrational ones need rank >= 2"
                    .to_string(),
            ),
            Error::DegenerateStep => (EXIT_COMPUTATION, "lengths are tied".to_string()),
            _ => (EXIT_COMPUTATION, String::new()),
        };
        Self {
            code,
            error: e.to_string(),
            hint,
        }
    }
}

type Outcome<T> = Result<T, Failure>;

fn level(n: u64) -> Outcome<Level> {
    Level::new(n).map_err(|e| Failure::usage(e.to_string(), "levels are positive integers"))
}

fn parse_range(s: &str) -> Outcome<Vec<u64>> {
    let bad = || {
        Failure::usage(
            format!("bad range {s:?}"),
            "use --range A..B with 1 <= A <= B",
        )
    };
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let a: u64 = a.trim().parse().map_err(|_| bad())?;
    let b: u64 = b
        .trim()
        .trim_start_matches('=')
        .parse()
        .map_err(|_| bad())?;
    if a == 0 || a > b {
        return Err(bad());
    }
    Ok((a..=b).collect())
}

enum Target {
    One(u64),
    Many(Vec<u64>),
}

fn target(l: &Levels) -> Outcome<Target> {
    match (&l.n, &l.range) {
        (Some(n), None) => Ok(Target::One(*n)),
        (None, Some(r)) => Ok(Target::Many(parse_range(r)?)),
        _ => Err(Failure::usage(
            "a level N or --range A..B is required",
            "e.g. `genus 11`",
        )),
    }
}

/// Runs one command per level; a batch reports failures inline.
fn per_level<F>(t: Target, f: F) -> Outcome<Value>
where
    F: Fn(u64) -> Outcome<Value> + Sync,
{
    match t {
        Target::One(n) => f(n),
        Target::Many(ns) => {
            let out: Vec<Value> = ns
                .par_iter()
                .map(|&n| {
                    f(n).unwrap_or_else(|e| json!({ "N": n, "error": e.error, "hint": e.hint }))
                })
                .collect();
            Ok(Value::Array(out))
        }
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("records serialize")
}

fn space(n: u64) -> Outcome<CuspidalSubspace> {
    Ok(cuspidal_subspace(Arc::new(build_space(level(n)?))))
}

/// The default pipeline for one level: decomposition with automatic primes,
/// Hecke matrices for every prime used, and classification.
pub fn compute_record(n: u64) -> Result<LevelRecord, Error> {
    let lv = Level::new(n)?;
    let curve = curve_data(lv);
    let s = cuspidal_subspace(Arc::new(build_space(lv)));
    let orbits = if s.dimension() == 0 {
        Vec::new()
    } else {
        decompose_auto(&s)?
    };
    let primes: Vec<u64> = orbits
        .iter()
        .flat_map(|o| o.coefficient_map.keys().copied())
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    let hecke = primes
        .iter()
        .map(|&p| Ok(HeckeRecord::new(p, &hecke_matrix(p, &s)?.matrix)))
        .collect::<Result<Vec<_>, Error>>()?;
    let classes = orbits
        .iter()
        .enumerate()
        .map(|(i, o)| Ok(ClassRecord::new(n, i, &classify(o, &curve)?)))
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(LevelRecord {
        curve: CurveRecord::from(&curve),
        ambient_dimension: s.space.dimension(),
        cuspidal_dimension: s.dimension(),
        primes,
        hecke,
        orbits: orbits
            .iter()
            .enumerate()
            .map(|(i, o)| OrbitRecord::new(i, o))
            .collect(),
        classes,
    })
}

struct Context {
    cache: Option<Cache>,
}

impl Context {
    fn record(&self, n: u64) -> Outcome<LevelRecord> {
        level(n)?;
        if let Some(r) = self.cache.as_ref().and_then(|c| c.load(n)) {
            return Ok(r);
        }
        let r = compute_record(n)?;
        if let Some(c) = &self.cache {
            c.store(&r);
        }
        Ok(r)
    }
}

fn decompose_output(r: &LevelRecord) -> Value {
    to_value(&DecomposeOutput {
        n: r.curve.n,
        genus: r.curve.genus,
        cuspidal_dimension: r.cuspidal_dimension,
        primes: &r.primes,
        orbits: &r.orbits,
    })
}

fn explicit_decompose(n: u64, primes: &[u64]) -> Outcome<Value> {
    let s = space(n)?;
    let genus = curve_data(level(n)?).genus;
    let orbits: Vec<EigenformOrbit> = if s.dimension() == 0 {
        Vec::new()
    } else {
        decompose(&s, primes)?
    };
    let records: Vec<OrbitRecord> = orbits
        .iter()
        .enumerate()
        .map(|(i, o)| OrbitRecord::new(i, o))
        .collect();
    Ok(to_value(&DecomposeOutput {
        n,
        genus,
        cuspidal_dimension: s.dimension(),
        primes,
        orbits: &records,
    }))
}

fn classify_output(ctx: &Context, n: u64, orbit: Option<usize>) -> Outcome<Value> {
    let r = ctx.record(n)?;
    if r.curve.genus == 0 {
        return Err(Error::NoCuspForms(n).into());
    }
    match orbit {
        None => Ok(to_value(&r.classes)),
        Some(k) => r.classes.get(k).map(to_value).ok_or_else(|| {
            Failure::usage(
                format!("level {n} has {} orbits; no orbit {k}", r.classes.len()),
                "orbit indices start at 0",
            )
        }),
    }
}

fn periods_output(n: u64, orbit: usize, prec: u32) -> Outcome<Value> {
    if prec < 40 {
        return Err(Failure::usage(
            format!("--prec {prec} is below 40 digits"),
            "rank detection needs --prec 40 or more",
        ));
    }
    let s = space(n)?;
    if s.dimension() == 0 {
        return Err(Error::NoCuspForms(n).into());
    }
    let orbits = decompose_auto(&s)?;
    let o = orbits.get(orbit).ok_or_else(|| {
        Failure::usage(
            format!("level {n} has {} orbits; no orbit {orbit}", orbits.len()),
            "orbit indices start at 0",
        )
    })?;
    let basis = homology_generators(&s);
    let f = NumericEigenform::new(o, orbit, &s.space, order_for(&basis.gammas, prec), prec)?;
    let pv = numeric_jacobian(&f, &basis.gammas, prec)?;
    let report = detect_rank(&pv.values, prec)?;
    let exact = module_rank(&JacobianModule::of_orbit(o));
    Ok(json!({
        "level": n,
        "orbit": orbit,
        "degree": o.degree,
        "prec": prec,
        "cycles": basis.gammas.iter().map(|g| vec![g[0][0], g[0][1], g[1][0], g[1][1]]).collect::<Vec<_>>(),
        "values": pv.values.iter().map(|v| v.to_decimal(prec)).collect::<Vec<_>>(),
        "error_log10": pv.error_log10.iter().map(|e| (e * 10.0).round() / 10.0).collect::<Vec<_>>(),
        "precision_estimate": pv.precision_estimate,
        "detected_rank": report.rank,
        "relations": report.relations.iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "max_residual_log10": if report.max_residual_log10.is_finite() {
            json!((report.max_residual_log10 * 10.0).round() / 10.0)
        } else {
            Value::Null
        },
        "exact_rank": exact,
        "agree": exact == report.rank,
    }))
}

fn iet_output(
    lengths: &[String],
    perm: &[usize],
    steps: usize,
    field: Option<&str>,
    root: Option<usize>,
) -> Outcome<Value> {
    let k = match field {
        Some(f) => NumberField::new(QPolynomial::parse(f, "w")?)?,
        None => NumberField::rationals(),
    };
    let emb = match root {
        Some(i) => RealEmbedding::new(&k, i)?,
        None => RealEmbedding::largest(&k)?,
    };
    let ls = lengths
        .iter()
        .map(|s| parse_length(s, &k))
        .collect::<Result<Vec<NFElement>, _>>()?;
    let t = Iet::from_one_based(ls, perm, emb).map_err(|e| {
        Failure::usage(
            e.to_string(),
            "lengths must be positive and the permutation irreducible",
        )
    })?;
    if t.lengths().iter().all(|l| l.as_rational().is_some()) {
        let r = periodicity_report(&t)?;
        Ok(json!({
            "kind": "periodic",
            "periodic": r.periodic,
            "period_lcm": r.period_lcm.to_string(),
            "cells": r.cells,
            "cycle_lengths": r.cycle_lengths,
        }))
    } else {
        let r = minimality_probe(&t, steps)?;
        Ok(json!({
            "kind": "minimality_probe",
            "steps": r.steps,
            "no_periodic_orbit_found": r.no_periodic_orbit_found,
            "keane_violations": r.keane_violations,
            "connections": r.connections.iter().map(|c| json!({"from": c.from, "to": c.to, "steps": c.steps})).collect::<Vec<_>>(),
        }))
    }
}

fn torus_output(m: &[i64]) -> Outcome<Value> {
    let [a, b, c, d] = m else {
        return Err(Failure::usage(
            format!("--matrix needs 4 entries, got {}", m.len()),
            "e.g. --matrix 2,1,1,1",
        ));
    };
    let t = classify_torus(&[[*a, *b], [*c, *d]])
        .map_err(|e| Failure::usage(e.to_string(), "the matrix must have determinant 1"))?;
    let mut out = json!({ "kind": t.kind.as_str(), "trace": t.trace });
    if let Some((lam, emb)) = t.dilatation {
        out["dilatation"] = json!({
            "minimal_polynomial": lam.minimal_polynomial().to_string_var("x"),
            "approx": emb.to_f64(&lam),
        });
    }
    Ok(out)
}

fn dispatch(cli: &Cli) -> Outcome<Value> {
    let ctx = Context {
        cache: (!cli.no_cache).then(Cache::from_env),
    };
    match &cli.command {
        Command::Genus(l) => per_level(target(l)?, |n| {
            Ok(to_value(&CurveRecord::from(&curve_data(level(n)?))))
        }),
        Command::Decompose { levels, primes } => {
            let t = target(levels)?;
            match primes {
                Some(ps) => per_level(t, |n| explicit_decompose(n, ps)),
                None => per_level(t, |n| Ok(decompose_output(&ctx.record(n)?))),
            }
        }
        Command::Classify { levels, orbit } => {
            per_level(target(levels)?, |n| classify_output(&ctx, n, *orbit))
        }
        Command::Periods { n, orbit, prec } => periods_output(*n, *orbit, *prec),
        Command::Iet {
            lengths,
            perm,
            steps,
            field,
            root,
        } => iet_output(lengths, perm, *steps, field.as_deref(), *root),
        Command::Torus { matrix } => torus_output(matrix),
    }
}

/// Parses arguments (the first is the program name) and returns the exit
/// code with the text for standard output.
pub fn run<I, T>(args: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                return (0, e.to_string().trim_end().to_string());
            }
            let msg = e.kind().as_str().unwrap_or("invalid arguments").to_string();
            let detail = e.to_string();
            let first = detail
                .lines()
                .next()
                .unwrap_or(&msg)
                .trim_start_matches("error: ")
                .to_string();
            let f = Failure::usage(first, "run `modfol --help`");
            return (f.code, f.to_json().to_string());
        }
    };
    match dispatch(&cli) {
        Ok(v) if cli.pretty => (0, pretty::render(&v)),
        Ok(v) => (0, v.to_string()),
        Err(f) => (f.code, f.to_json().to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_codes() {
        assert_eq!(
            Failure::from(Error::Indeterminate {
                residual_log10: -20.0
            })
            .code,
            EXIT_PRECISION
        );
        assert_eq!(
            Failure::from(Error::Precision("x".into())).code,
            EXIT_PRECISION
        );
        assert_eq!(
            Failure::from(Error::UndecidedSplit { next_prime: 3 }).code,
            EXIT_COMPUTATION
        );
        assert_eq!(Failure::from(Error::Parse("x".into())).code, EXIT_USAGE);
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("3..5").unwrap(), vec![3, 4, 5]);
        assert_eq!(parse_range("7..=7").unwrap(), vec![7]);
        assert!(parse_range("5..3").is_err());
        assert!(parse_range("0..3").is_err());
        assert!(parse_range("x").is_err());
    }

    #[test]
    fn records_are_deterministic() {
        let a = compute_record(29).unwrap();
        let b = compute_record(29).unwrap();
        assert_eq!(cache::encode(&a), cache::encode(&b));
        assert_eq!(a.classes[0].class, "pseudo_anosov");
        assert_eq!(a.hecke[0].rows.len(), 4);
    }
}
