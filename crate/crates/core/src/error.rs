use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("component {index} is negative ({value})")]
    NegativeComponent { index: usize, value: f64 },

    #[error("components sum to {sum}, exceeding 1")]
    NormExceeded { sum: f64 },

    #[error("a W-class state needs at least two parties, got {0}")]
    TooFewParties(usize),

    #[error("state is not representable exactly: {0}")]
    NotRepresentable(String),

    #[error("invalid local measurement: {0}")]
    InvalidMeasurement(String),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("subset must contain at least two parties, got {0}")]
    SubsetTooSmall(usize),

    #[error("party index {party} out of range for {n_parties} parties")]
    PartyOutOfRange { party: usize, n_parties: usize },

    #[error("invalid distillation graph: {0}")]
    InvalidGraph(String),

    #[error("operation requires x0 = 0, got x0 = {0}")]
    NonzeroX0(f64),

    #[error("state is not a uniform W state")]
    NotUniformW,

    #[error("measurement completion operator is not positive semidefinite (min eigenvalue {0:e})")]
    CompletionNotPsd(f64),

    #[error("projection solver did not converge after {iterations} iterations (cone residual {cone_residual:e}, affine residual {affine_residual:e})")]
    NoConvergence { iterations: usize, cone_residual: f64, affine_residual: f64 },

    #[error("cross-check failed: {0}")]
    CrossCheck(String),

    #[error("malformed SDPA data: {0}")]
    Sdpa(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
