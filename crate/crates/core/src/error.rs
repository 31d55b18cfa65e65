use std::io;

use thiserror::Error;

/// Errors produced by code construction, file parsing and decoder setup.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("format error at line {line}: {msg}")]
    Format { line: usize, msg: String },

    #[error("gave up after {attempts} frames with only {found} of {wanted} failures collected")]
    AttemptsExhausted {
        attempts: u64,
        found: usize,
        wanted: usize,
    },

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

pub(crate) fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, actual })
    }
}
