use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A coefficient at or beyond the known precision was requested, or the
    /// available data is too short for the computation that was asked for.
    #[error("insufficient precision: need {required}, have {available}")]
    PrecisionExceeded { required: usize, available: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid basis: {0}")]
    Validation(String),

    #[error("network error: {0}")]
    Network(String),

    #[error("unexpected upstream response: {0}")]
    UpstreamFormat(String),

    #[error("no basis available for level {level}: {reason}")]
    NoBasis { level: u64, reason: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Rank 0: every monomial vanished through the column range.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("data integrity check failed: {0}")]
    DataIntegrity(String),

    #[error("echelon and wronskian criteria disagree for level {level}, weight {weight}")]
    MethodDisagreement { level: u64, weight: u32 },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("results file: {0}")]
    Records(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn precision(required: usize, available: usize) -> Self {
        Error::PrecisionExceeded {
            required,
            available,
        }
    }
}
