//! Error type shared by every module in the crate.

use std::path::Path;

/// All failure modes surfaced by the library.
#[derive(Debug, thiserror::Error)]
pub enum KgaError {
    /// Malformed input file (wrong field count, bad number, ...).
    #[error("parse error at {path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    /// A symbol could not be resolved against a vocabulary.
    #[error("vocabulary error: {0}")]
    Vocab(String),

    /// A source symbol mapped to two different targets.
    #[error("conflict error: {0}")]
    Conflict(String),

    /// An argument violated a documented precondition.
    #[error("argument error: {0}")]
    Arg(String),

    /// Matrix/vector dimensions do not line up.
    #[error("shape error: {0}")]
    Shape(String),

    /// An entity, relation, or triplet index is out of range.
    #[error("index error: {0}")]
    Index(String),

    /// A non-finite value appeared where a finite one is required.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// A binary checkpoint is corrupt, truncated, or has an unknown version.
    #[error("format error: {0}")]
    Format(String),

    /// Rejection sampling could not produce a valid sample.
    #[error("sampling error: {0}")]
    Sampling(String),

    /// An internal call-sequence contract was violated (e.g. stale cache).
    #[error("contract error: {0}")]
    Contract(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl KgaError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        KgaError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, KgaError>;
