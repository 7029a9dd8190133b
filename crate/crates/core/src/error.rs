use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),

    /// Malformed input at a known line (1-based).
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A sentence violates the dependency-tree invariants.
    #[error("sentence {sentence}: {message}")]
    Structure { sentence: String, message: String },

    #[error("illegal transition {transition}: {reason}")]
    IllegalTransition { transition: String, reason: String },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("model file: {0}")]
    Format(String),

    /// Training diverged.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn structure(sentence: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Structure {
            sentence: sentence.into(),
            message: message.into(),
        }
    }

    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Error::Invalid(message.into())
    }
}
