use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("direction set is empty")]
    EmptyDirectionSet,

    #[error("vector must be nonzero")]
    ZeroVector,

    #[error("sample count must be at least 1")]
    ZeroSampleCount,

    #[error("starting point is infeasible")]
    InfeasibleStart,

    #[error("invalid value for `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("unknown problem `{0}`")]
    UnknownProblem(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
