//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by dataset IO, selection, search, and the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed {format} file: {msg}")]
    MalformedFile { format: &'static str, msg: String },

    /// Row-level validation failure; `row` is the zero-based record index.
    #[error("row {row}: {msg}")]
    BadRow { row: usize, msg: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("cosine distance undefined for zero vector")]
    ZeroVector,

    #[error("class {class_id} has {available} usable items but {needed} are required")]
    ClassTooSmall {
        class_id: u32,
        available: usize,
        needed: usize,
    },

    #[error("instance too large for exhaustive search: {0}")]
    InstanceTooLarge(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("loss is not a scalar (shape {0:?})")]
    LossNotScalar(Vec<usize>),

    #[error("non-finite loss encountered: {0}")]
    NonFiniteLoss(String),

    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Wrap an error with the pipeline stage it occurred in.
    pub fn in_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
