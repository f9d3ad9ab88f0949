use simplex_priors::Error as CoreError;
use thiserror::Error;

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }

    /// Machine-readable tag printed before the message.
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage_error",
            CliError::Data(_) => "data_error",
            CliError::Numerical(_) => "numerical_failure",
        }
    }

    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub(crate) fn data(msg: impl Into<String>) -> Self {
        CliError::Data(msg.into())
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let msg = one_line(&e.to_string());
        match e {
            CoreError::Numerical(_) | CoreError::NonConvergence { .. } | CoreError::LowAcceptance { .. } => {
                CliError::Numerical(msg)
            }
            CoreError::InvalidConfig(_) => CliError::Usage(msg),
            _ => CliError::Data(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(one_line(&e.to_string()))
    }
}

pub(crate) fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

pub type CliResult<T> = std::result::Result<T, CliError>;
