//! Error type shared across the crate.

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A graph or model failed structural validation (cycles, duplicate ids,
    /// dangling edges, malformed probability tables, ...).
    #[error("structural error: {0}")]
    Structural(String),

    /// An operation would exceed a hard capacity limit, e.g. enumerating a
    /// joint state space past the configured cap.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// Input data is unusable: wrong dimensions, Na, empty sample set, ...
    #[error("data error: {0}")]
    Data(String),

    /// Randomized generation exhausted its retry budget without meeting the
    /// requested constraints.
    #[error("generation failed: {0}")]
    Generation(String),

    /// An iterative fit (EM, NMF) failed to produce a usable result.
    #[error("fit failed: {0}")]
    Fit(String),

    /// Serialization or file I/O problem.
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
