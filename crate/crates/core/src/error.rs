use thiserror::Error;

/// Errors produced by the sampling library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input to {0}")]
    EmptyInput(&'static str),
    #[error("degenerate ensemble: {0}")]
    DegenerateEnsemble(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("dataset error: {0}")]
    Dataset(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("run aborted: {0}")]
    Aborted(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
