use thiserror::Error;

/// Failures of a command, split by the exit code they map to.
#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable, malformed or inconsistent configuration. Exit code 2.
    #[error("config error: {0}")]
    Config(String),
    /// A computation failed on valid input. Exit code 3.
    #[error("numerical failure: {0}")]
    Numerical(String),
    /// Writing the output failed. Exit code 1.
    #[error("output error: {0}")]
    Output(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) => 2,
            Self::Numerical(_) => 3,
            Self::Output(_) => 1,
        }
    }
}

impl From<ionlink::Error> for CliError {
    fn from(e: ionlink::Error) -> Self {
        use ionlink::Error as E;
        match e {
            E::InvalidInput(_) | E::UnknownLabel(_) | E::Truncation { .. } => Self::Config(e.to_string()),
            _ => Self::Numerical(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
