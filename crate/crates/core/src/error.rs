use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A numeric argument lies outside its admissible range (e.g. `k > m`).
    #[error("{name} out of range: {detail}")]
    Parameter { name: &'static str, detail: String },

    #[error("unknown candidate `{0}`")]
    UnknownCandidate(String),

    #[error("invalid input: {0}")]
    Input(String),

    /// An attainability denominator (total approval count) would be zero.
    #[error("undefined denominator: total approval count is 0")]
    UndefinedDenominator,

    #[error("utilities tied at the take-{x} boundary ({a} vs {b})")]
    TiedUtilities { x: usize, a: String, b: String },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, detail: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            detail: detail.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
