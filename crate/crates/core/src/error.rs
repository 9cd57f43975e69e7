use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A physical or hardware constraint was violated.
    #[error("constraint violation: {0}")]
    Constraint(String),

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("{what} of size {size} exceeds the supported bound of {max}")]
    TooLarge {
        what: &'static str,
        size: usize,
        max: usize,
    },

    #[error("atoms {0} and {1} coincide; their interaction is singular")]
    SingularInteraction(usize, usize),

    #[error("operator is not Hermitian (max asymmetry {0:.3e})")]
    NonHermitian(f64),

    #[error("invalid pulse sequence: {}", .0.join("; "))]
    InvalidSequence(Vec<String>),

    #[error("detection model is singular: epsilon + epsilon' = {0} >= 1")]
    SingularDetectionModel(f64),

    #[error("gaussian process fit failed: {0}")]
    Fit(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("objective evaluation failed at step {step}: {message}")]
    Objective { step: usize, message: String },

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
