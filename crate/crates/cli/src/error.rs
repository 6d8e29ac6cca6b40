use thiserror::Error;

/// Failures of a CLI run, each mapped to an exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Core(#[from] renyi_core::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;

impl CliError {
    /// 0 ok, 1 usage (bad input, arguments, files), 2 numeric invariant
    /// violation.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invariant(_) => 2,
            CliError::Core(e) => match e {
                renyi_core::Error::InvariantViolation(_) | renyi_core::Error::BracketFailure { .. } => 2,
                _ => 1,
            },
            _ => 1,
        }
    }
}
