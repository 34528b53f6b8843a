use thiserror::Error;

/// Exit status for malformed or invalid input.
pub const EXIT_INPUT: i32 = 64;
/// Exit status for a numerical failure on valid input.
pub const EXIT_COMPUTE: i32 = 70;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CliError {
    #[error("cannot read {0}: {1}")]
    Io(String, String),
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("{0}")]
    Input(String),
    #[error("computation failed: {0}")]
    Compute(String),
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Compute(_) => EXIT_COMPUTE,
            _ => EXIT_INPUT,
        }
    }
}

impl From<hillpick::Error> for CliError {
    fn from(e: hillpick::Error) -> Self {
        use hillpick::Error::*;
        match e {
            Singular(_) | RankMismatch { .. } | KernelMismatch(_) => CliError::Compute(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}
