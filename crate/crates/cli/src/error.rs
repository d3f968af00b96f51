use std::fmt;

/// Failure of a command, carrying its exit code.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Bad flags, parameters or input; exit code 2.
    Invalid(String),
    /// A numerical method missed its tolerance; exit code 3.
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Invalid(m) | CliError::Numerical(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}

impl From<nmlg_core::Error> for CliError {
    fn from(e: nmlg_core::Error) -> Self {
        if e.is_numerical_failure() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Invalid(e.to_string())
        }
    }
}
