use thiserror::Error;

/// Errors produced by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degree {degree} exceeds what a grid of {n_points} points resolves")]
    DegreeExceedsGrid { degree: usize, n_points: usize },

    #[error("value {value} lies outside the tabulated range [0, {max}] of the Orlicz function")]
    RangeExceeded { value: f64, max: f64 },

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("invalid generator: {0}")]
    InvalidGenerator(String),

    #[error("subspace is not invariant under the operator (leakage {leakage:e})")]
    NotInvariant { leakage: f64 },

    #[error("exact endpoint norm is unsupported here: {0}")]
    UnsupportedExact(String),

    #[error("invalid operator: {0}")]
    InvalidOperator(String),

    #[error("brute-force oracle supports dimension <= 3, got {0}")]
    OracleTooLarge(usize),

    #[error("witness vector must be nonzero")]
    InvalidWitness,

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
