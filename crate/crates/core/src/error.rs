use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("matrix is not Hermitian (max asymmetry {0:e})")]
    NotHermitian(f64),

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("state does not commute with total S^z: block {block} has magnitude {magnitude:e}")]
    NotSzBlock { block: String, magnitude: f64 },

    #[error("state is not pure (1 - Tr rho^2 = {0:e})")]
    NotPure(f64),

    #[error("timescale diverges: {0}")]
    Divergent(String),

    #[error("oracle dimension {dim} exceeds the cap of {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("lattice too small: half-extent {have} does not cover the required {need}")]
    Coverage { have: f64, need: f64 },

    #[error("time series: {0}")]
    Series(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
