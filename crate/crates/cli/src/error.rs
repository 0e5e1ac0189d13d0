use std::fmt;
use std::process::ExitCode;

/// Errors with the stable exit-status contract:
/// 2 usage, 3 domain precondition, 4 check failure, 1 I/O.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(String),
    CheckFailed(String),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Io(_) => ExitCode::from(1),
            CliError::Usage(_) => ExitCode::from(2),
            CliError::Domain(_) => ExitCode::from(3),
            CliError::CheckFailed(_) => ExitCode::from(4),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Domain(m) | CliError::CheckFailed(m) => f.write_str(m),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}
