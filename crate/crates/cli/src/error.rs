use std::fmt;

use shiftlab_core::Error;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Core(Error),
    /// Checks failed after the artifacts were written.
    Invariant(Vec<String>),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(Error::Domain(_) | Error::Capability(_)) => 2,
            CliError::Core(Error::Precision(_)) => 3,
            CliError::Core(Error::Budget(_)) => 4,
            CliError::Core(Error::Invariant(_)) | CliError::Invariant(_) => 5,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Invariant(names) => write!(f, "invariant checks failed: {}", names.join(", ")),
        }
    }
}
