pub mod config;
pub mod run;
pub mod table;

use std::fmt;

/// Error category of a CLI run, mapped to the process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Invalid configuration — exit 2.
    Config(String),
    /// Numeric failure — exit 3.
    Numeric(String),
    /// I/O failure — exit 4.
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    pub fn category(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Numeric(_) => "numeric",
            CliError::Io(_) => "io",
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) | CliError::Numeric(m) | CliError::Io(m) => write!(f, "{m}"),
        }
    }
}

impl From<cavity_walk::WalkError> for CliError {
    fn from(e: cavity_walk::WalkError) -> Self {
        use cavity_walk::WalkError::*;
        match e {
            Validation(_) | Unsupported(_) => CliError::Config(e.to_string()),
            LatticeOverflow { .. } | GaplessWinding { .. } | Numeric(_) => {
                CliError::Numeric(e.to_string())
            }
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
