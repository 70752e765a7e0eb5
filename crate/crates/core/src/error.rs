use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("duplicate url {url:?} on lines {first} and {second}")]
    DuplicateUrl { url: String, first: usize, second: usize },

    #[error("degenerate document: vector is empty")]
    EmptyVector,

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("metric undefined: {0}")]
    Metric(String),

    #[error("corpus has no gold labels; evaluation needs a labeled fixture")]
    Unlabeled,

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
