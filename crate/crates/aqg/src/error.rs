//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AqgError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite sample at lattice index ({i1}, {i2}): {value}")]
    NonFiniteSample { i1: usize, i2: usize, value: f64 },

    #[error("Hermitian symmetry violated: max defect {defect:.3e} exceeds {limit:.3e}")]
    SymmetryViolation { defect: f64, limit: f64 },

    #[error("operation requires a mean-free field, but |coefficient at k=0| = {mean:.3e}")]
    NonzeroMean { mean: f64 },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("CFL violation: dt = {dt:.3e} exceeds the advective bound; suggested dt <= {suggested:.3e}")]
    CflViolation { dt: f64, suggested: f64 },

    #[error("non-finite field state at t = {t}; aborted with last valid state")]
    NonFiniteState { t: f64 },

    #[error("configuration invalid:\n{}", .0.join("\n"))]
    Config(Vec<String>),

    #[error("records: {0}")]
    Records(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, AqgError>;
