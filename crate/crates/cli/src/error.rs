use std::fmt;

/// Failure of a subcommand, carrying the process exit status.
#[derive(Debug)]
pub enum CliError {
    /// Bad arguments, unreadable or malformed input. Exit 1.
    User(String),
    /// A bug or an environment failure such as an unwritable output. Exit 2.
    Internal(String),
    /// Input data that cannot be interpreted unambiguously. Exit 3.
    Ambiguity(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::User(_) => 1,
            CliError::Internal(_) => 2,
            CliError::Ambiguity(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::User(m) | CliError::Internal(m) | CliError::Ambiguity(m) => f.write_str(m),
        }
    }
}

pub fn user(msg: impl fmt::Display) -> CliError {
    CliError::User(msg.to_string())
}

pub fn internal(msg: impl fmt::Display) -> CliError {
    CliError::Internal(msg.to_string())
}
