//! CLI error type with stable process exit codes.

use thiserror::Error;

/// Exit codes: 0 success, 2 configuration error, 3 numeric-domain error,
/// 4 I/O error.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("numeric domain error: {0}")]
    Domain(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Domain(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

/// Core errors surfacing while an experiment runs are numeric-domain
/// failures; configuration-time validation wraps them as `Config` itself.
impl From<urafocus_core::Error> for CliError {
    fn from(err: urafocus_core::Error) -> Self {
        CliError::Domain(err.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
