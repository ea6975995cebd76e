use thiserror::Error;

/// Everything a command can fail with, mapped onto process exit codes.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] pj_core::Error),
    #[error("check failed: {0}")]
    ChecksFailed(String),
    #[error("malformed input: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 1: a check or solver assertion failed; 2: bad usage; 3: a numerical
    /// method did not converge.
    pub fn exit_code(&self) -> i32 {
        use pj_core::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(E::InvalidArgument(_) | E::NonRational(_)) => 2,
            CliError::Core(E::NonConvergence { .. } | E::Extrapolation(_) | E::NearZeroDenominator { .. }) => 3,
            _ => 1,
        }
    }
}
