use thiserror::Error;

/// CLI failure classes, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("input data: {0}")]
    Data(String),
    #[error("check failed: {0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Failed(_) => 2,
            CliError::Usage(_) => 64,
            CliError::Data(_) => 65,
        }
    }
}

/// Library errors raised while validating user input.
pub fn data(e: qdisturb::Error) -> CliError {
    match e {
        qdisturb::Error::InternalConsistency(m) => CliError::Failed(m),
        qdisturb::Error::InvalidParameter(m) => CliError::Usage(m),
        other => CliError::Data(other.to_string()),
    }
}
