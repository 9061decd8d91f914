//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by simulation, calibration, data handling, and I/O.
#[derive(Error, Debug)]
pub enum Error {
    /// Tensor/vector dimensions do not line up.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A numeric input was NaN or infinite where a finite value is required.
    #[error("non-finite value: {0}")]
    NonFinite(String),

    /// An argument fell outside its documented domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A configuration file or experiment setting is inconsistent.
    #[error("invalid config: {0}")]
    Config(String),

    /// Structured text parse failure with location context.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// File format version not understood.
    #[error("unsupported format version: expected {expected}, found {found}")]
    Version { expected: String, found: String },

    /// Training loss became non-finite.
    #[error("training diverged at epoch {epoch}: loss = {loss}")]
    Divergence { epoch: usize, loss: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
