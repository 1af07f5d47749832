use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by data loading, model fitting and evaluation.
#[derive(Debug, Error)]
pub enum Error {
    /// A required file or directory does not exist.
    #[error("not found: {path}{}", hint.as_deref().map(|h| format!(" ({h})")).unwrap_or_default())]
    NotFound { path: PathBuf, hint: Option<String> },

    /// A file exists but its contents are malformed.
    #[error("parse error in {file} at line {line}: {message}")]
    Parse {
        file: PathBuf,
        line: usize,
        message: String,
    },

    /// An argument or input violated a precondition.
    #[error("validation error: {0}")]
    Validation(String),

    /// Matrix/vector dimensions do not match what the operation expects.
    #[error("shape error: expected {expected}, got {found}")]
    Shape { expected: String, found: String },

    /// A base learner inside a stack failed to fit.
    #[error("base learner {index} failed: {source}")]
    BaseLearner {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn shape(expected: impl Into<String>, found: impl Into<String>) -> Self {
        Error::Shape {
            expected: expected.into(),
            found: found.into(),
        }
    }
}
