use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected length {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("instance has {n} weights, above the exhaustive search limit of {limit}")]
    Capacity { n: usize, limit: usize },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid GA parameters: {0}")]
    InvalidParams(String),

    #[error("invalid key parameters: {0}")]
    InvalidKey(String),

    #[error("malformed ciphertext: {0}")]
    MalformedCiphertext(String),

    #[error("infeasible ciphertext: block {index} has value {value} but the public key can reach at most {capacity}")]
    InfeasibleCiphertext { index: usize, value: u128, capacity: u128 },

    #[error("no preimage found within {generations} generations")]
    NotFound { generations: usize },

    #[error("invalid sweep configuration: {0}")]
    InvalidSweep(String),

    #[error("cannot summarize an empty list of sweep cells")]
    EmptySummary,

    #[error("incomplete sweep grid, missing cells: {}", .0.join(", "))]
    MissingCells(Vec<String>),

    #[error("malformed table {path}: {reason}")]
    MalformedTable { path: PathBuf, reason: String },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
