//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Errors produced by array construction and the numeric operations.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A constructor argument is outside its allowed domain.
    #[error("invalid parameter `{name}`: {reason}")]
    Param {
        name: &'static str,
        reason: String,
    },

    /// An operation was evaluated outside its numeric domain
    /// (e.g. a focal range below the near-field lower bound).
    #[error("domain error: {0}")]
    Domain(String),

    /// Vector or matrix dimensions do not line up.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Param {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
