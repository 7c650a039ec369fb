use std::fmt;

use mtc_core::Error as CoreError;

/// Failure of a command, carrying its process exit code.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Exit 1: a runtime failure such as a failed self-test or I/O error.
    Failure(String),
    /// Exit 2: the configuration or a flag is invalid.
    Config(String),
    /// Exit 3: the z-basis run fell outside the two-component family.
    OutsideFamily(String),
    /// Exit 4: the requested qubit count exceeds a dense capacity.
    Capacity(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Failure(_) => 1,
            CliError::Config(_) => 2,
            CliError::OutsideFamily(_) => 3,
            CliError::Capacity(_) => 4,
        }
    }

    /// Classify a core error raised while validating input.
    pub fn from_config(e: CoreError) -> Self {
        match e {
            CoreError::Capacity { .. } => CliError::Capacity(e.to_string()),
            CoreError::OutsideFamily { .. } => CliError::OutsideFamily(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Capacity { .. } => CliError::Capacity(e.to_string()),
            CoreError::OutsideFamily { .. } => CliError::OutsideFamily(e.to_string()),
            CoreError::InvalidWeight(_)
            | CoreError::InvalidQubitCount(_)
            | CoreError::InvalidBasisString(_)
            | CoreError::QubitOutOfRange { .. }
            | CoreError::InvalidArgument(_)
            | CoreError::ZeroShots => CliError::Config(e.to_string()),
            _ => CliError::Failure(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failure(e.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Failure(m) => write!(f, "error: {m}"),
            CliError::Config(m) => write!(f, "invalid configuration: {m}"),
            CliError::OutsideFamily(m) => write!(f, "outside two-component family: {m}"),
            CliError::Capacity(m) => write!(f, "capacity exceeded: {m}"),
        }
    }
}

impl std::error::Error for CliError {}
