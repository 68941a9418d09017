use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("approximation ratio undefined: optimal energy is zero")]
    UndefinedRatio,

    #[error("group count exceeds materialization cap of {cap}")]
    CapExceeded { cap: usize },

    #[error("outcome {0} is outside the codec range")]
    Decode(u64),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("problem too large: {0}")]
    TooLarge(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
