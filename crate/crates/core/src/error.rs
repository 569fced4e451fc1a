use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("{n} qubits exceeds the configured cap of {cap}")]
    TooManyQubits { n: usize, cap: usize },

    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("missing reference energy for normalized transfer")]
    MissingReference,

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
