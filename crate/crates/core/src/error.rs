use thiserror::Error;

/// Errors shared across the crate.
///
/// `PassageNotReached` and `InsufficientHorizon` are recoverable signals:
/// ensemble drivers count them (rejection / extension bookkeeping) instead of
/// aborting a run.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(
        "circulant embedding failed: minimum eigenvalue {min_eigenvalue:e} is below tolerance \
         and the dense factorization fallback does not cover n = {steps}"
    )]
    GenerationFailure { min_eigenvalue: f64, steps: usize },

    #[error("matrix is not positive definite (pivot {pivot:e} at row {row})")]
    NotPositiveDefinite { row: usize, pivot: f64 },

    #[error("extension is not supported for {kind} paths")]
    UnsupportedExtension { kind: &'static str },

    #[error("{what} out of range: requested {requested}, allowed up to {limit}")]
    OutOfRange {
        what: &'static str,
        requested: f64,
        limit: f64,
    },

    #[error("level {level} not reached: running maximum at the horizon is {max_at_horizon}")]
    PassageNotReached { level: f64, max_at_horizon: f64 },

    #[error("insufficient horizon: need {needed}, path ends at {available}")]
    InsufficientHorizon { needed: f64, available: f64 },

    #[error("empty sample set")]
    EmptySample,

    #[error("invalid sample set: {0}")]
    InvalidSample(String),
}

pub type Result<T> = core::result::Result<T, Error>;
