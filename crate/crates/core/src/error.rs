use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("capacity: {0}")]
    Capacity(String),

    #[error("index: {0}")]
    Index(String),

    #[error("shape: {0}")]
    Shape(String),

    #[error("argument: {0}")]
    Argument(String),

    #[error("config: {0}")]
    Config(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("validation error at line {line}: {message}")]
    Validation { line: usize, message: String },

    #[error("validation: {0}")]
    Invalid(String),

    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("objective returned non-finite value {value} at iteration {iteration}")]
    NonFiniteObjective { iteration: usize, value: f64 },

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Short machine-readable category, printed by the command-line front end.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Capacity(_) => "capacity",
            Error::Index(_) => "index",
            Error::Shape(_) => "shape",
            Error::Argument(_) => "argument",
            Error::Config(_) => "config",
            Error::Parse { .. } => "parse",
            Error::Validation { .. } | Error::Invalid(_) => "validation",
            Error::NonConvergence { .. } => "non-convergence",
            Error::NonFiniteObjective { .. } => "optimization",
            Error::DegenerateSample(_) => "degenerate-sample",
            Error::Io { .. } => "io",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
