//! Error type shared by every module.

use thiserror::Error;

/// Errors raised by domain validation and usage mistakes.
///
/// Numerical operations themselves do not fail: once inputs pass
/// validation, every computation is total (possibly returning `+inf`
/// as a first-class risk value).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    /// Input outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Two containers that must have equal length do not.
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    /// A nonempty input was required.
    #[error("empty input: {0}")]
    Empty(&'static str),
    /// A configuration or flag value is invalid.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl LabError {
    pub fn domain(msg: impl Into<String>) -> Self {
        LabError::Domain(msg.into())
    }

    pub fn param(msg: impl Into<String>) -> Self {
        LabError::InvalidParameter(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
