use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A value lies outside the domain an operation accepts.
    #[error("domain error: {0}")]
    Domain(String),

    /// A model, rule base, or configuration is internally inconsistent.
    #[error("specification error: {0}")]
    Specification(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("all {0} initial live points have zero likelihood")]
    Initialization(usize),

    #[error("constrained sampling gave up after {attempts} draws at log-likelihood {threshold}")]
    NonConvergence { attempts: u64, threshold: f64 },

    #[error("refusing to compare non-converged result for `{0}`")]
    NotConverged(String),

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

    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
