use eot_core::OtError;

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("exact oracle supports n <= {max}, got {n}")]
    TooLarge { n: usize, max: usize },
    #[error("slope fit needs at least two distinct positive x values")]
    DegenerateInput,
    #[error("images have different sides ({0} vs {1})")]
    ShapeMismatch(usize, usize),
    #[error("unknown algorithm `{0}`")]
    UnknownAlgo(String),
    #[error("invalid experiment: {0}")]
    Invalid(String),
    #[error(transparent)]
    Solver(#[from] OtError),
    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, BenchError>;
