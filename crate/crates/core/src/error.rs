use thiserror::Error;

/// Errors produced by the clustering library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty labeling")]
    EmptyLabeling,

    #[error("size mismatch: {0}")]
    SizeMismatch(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("instance too large for oracle: n = {n} exceeds limit {limit}")]
    TooLargeForOracle { n: usize, limit: usize },

    #[error("matrix has no PSD component")]
    NoPsdComponent,

    #[error("no comparable pairs")]
    NoComparablePairs,

    #[error("parse error at row {row}, column {col}: {msg}")]
    Parse { row: usize, col: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
