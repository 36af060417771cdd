use thiserror::Error;

/// Errors raised by the deterministic kernels and estimators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("empty vector")]
    Empty,

    #[error("negative or non-finite entry {value} at index {index}")]
    InvalidEntry { index: usize, value: f64 },

    #[error("entries sum to {0}, expected 1")]
    NotNormalized(f64),

    #[error("suffix sum {index} of the target vector is zero")]
    ZeroDenominator { index: usize },

    #[error("bridge does not close: final partial sum {0}")]
    OpenBridge(f64),

    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("chain of length {len} is shorter than k_max = {k_max}")]
    ChainTooShort { len: usize, k_max: usize },

    #[error("chain is not a valid {0} sample")]
    InvalidChain(&'static str),

    #[error("distribution function vanishes at the conditioning point {0}")]
    DegenerateConditioning(f64),

    #[error("argument {name} out of domain: {value}")]
    Domain { name: &'static str, value: f64 },

    #[error("{0}")]
    InvalidArgument(String),

    #[error("empty sample")]
    EmptySample,
}

pub type Result<T> = std::result::Result<T, Error>;
