use thiserror::Error;

/// Errors produced by the exact and numeric pipelines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("singular matrix")]
    Singular,
    #[error("eigenvalue is not simple: rank(T - lambda I) = {rank}, expected {expected}")]
    Multiplicity { rank: usize, expected: usize },
    #[error("truncation error: q-expansion known to order {have}, need order {need}")]
    Truncation { have: usize, need: usize },
    #[error(
        "undecided split: orbits not separated by the supplied primes; try adding p = {next_prime}"
    )]
    UndecidedSplit { next_prime: u64 },
    #[error("no cusp forms: X0({0}) has genus 0")]
    NoCuspForms(u64),
    #[error("degenerate path: lower-left entry is zero")]
    DegeneratePath,
    #[error("precision error: {0}")]
    Precision(String),
    #[error("indeterminate relation: residual {residual_log10:.1} (log10) lies between acceptance and rejection thresholds; increase precision")]
    Indeterminate { residual_log10: f64 },
    #[error("wrong case: {0}")]
    WrongCase(String),
    #[error("degenerate Rauzy step: tied lengths")]
    DegenerateStep,
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
