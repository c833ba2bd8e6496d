use thiserror::Error;

/// Errors raised by the solvers and domain-type constructors.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum OtError {
    #[error("entry {index} is negative ({value})")]
    NegativeEntry { index: usize, value: f64 },
    #[error("entries sum to {sum}, expected 1")]
    SumNotOne { sum: f64 },
    #[error("entry {index} is not finite")]
    NonFiniteEntry { index: usize },
    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("problem size n = {0} is too small (need n >= 2)")]
    TooSmallProblem(usize),
    #[error("cost matrix is identically zero")]
    ZeroCost,
    #[error("accuracy must be positive, got {0}")]
    BadEps(f64),
    #[error("smoothing weight eps' = {0} must satisfy 0 < eps'/8 < 1")]
    BadEpsPrime(f64),
    #[error("regularization eta must be positive, got {0}")]
    BadEta(f64),
    #[error("marginals must be strictly positive for the entropic problem")]
    NonPositiveMarginal,
    #[error("component index {index} out of range for n = {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("iterates became non-finite at epoch {epoch}")]
    NonFinite { epoch: usize },
    #[error("row or column {0} of the plan has zero mass")]
    DegenerateRow(usize),
    #[error("increasing probability weights sum to zero")]
    AllZero,
}

pub type Result<T> = std::result::Result<T, OtError>;
