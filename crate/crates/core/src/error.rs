//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Caller violated a documented precondition (out-of-range index,
    /// mismatched sizes, overlapping arguments, bad hyperparameter, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Numerically degenerate input (singular system, too few rows).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// Text format violation; `line` is 1-based.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn degenerate(msg: impl Into<String>) -> Self {
        Error::Degenerate(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
