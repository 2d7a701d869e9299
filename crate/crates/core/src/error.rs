use thiserror::Error;

/// Errors raised by the toolkit. Variants name the violated precondition.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("space mismatch: {left} vs {right}")]
    SpaceMismatch { left: String, right: String },

    #[error("wrong space kind: expected {expected}")]
    WrongSpaceKind { expected: &'static str },

    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("non-finite entry at index {index}")]
    NonFinite { index: usize },

    #[error("entry count {got} does not match space length {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("non-positive or non-finite weight {value} at index {index}")]
    NonPositiveWeight { index: usize, value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension {dim} too large to materialize (limit {limit}); use the matrix-free operator")]
    DimensionTooLarge { dim: usize, limit: usize },

    #[error("not a frame: lower bound {lower:e} is below tolerance {tol:e}")]
    NotAFrame { lower: f64, tol: f64 },

    #[error("solver did not reach tolerance after {iterations} iterations (residual {residual:e})")]
    SolverDiverged { iterations: usize, residual: f64 },

    #[error("count mismatch: {cells} cells but {vectors} vectors")]
    CountMismatch { cells: usize, vectors: usize },

    #[error("zero vector where a nonzero vector is required")]
    ZeroVector,

    #[error("bound order violated: Bessel bound {bessel:e} must be below frame lower bound {lower:e}")]
    BoundOrderViolation { bessel: f64, lower: f64 },

    #[error("wavelet is not admissible: |psi_hat(0)| = {zero_mode:e}, refinement growth {growth:e}")]
    NotAdmissible { zero_mode: f64, growth: f64 },

    #[error("scale must be nonzero")]
    ZeroScale,

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("admissibility constant not set")]
    MissingAdmissibility,

    #[error("window is identically zero")]
    ZeroWindow,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
