use std::process::ExitCode;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    Usage,
    Data,
    Numerical,
}

impl ErrorKind {
    pub fn exit_code(self) -> u8 {
        match self {
            Self::Usage => 2,
            Self::Data => 3,
            Self::Numerical => 4,
        }
    }
}

#[derive(Debug, thiserror::Error)]
#[error("{message}")]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { kind: ErrorKind::Usage, message: message.into() }
    }

    pub fn data(message: impl Into<String>) -> Self {
        Self { kind: ErrorKind::Data, message: message.into() }
    }

    /// Writes the error as a single JSON object on stderr and returns the
    /// matching exit code.
    pub fn report(&self) -> ExitCode {
        let body = serde_json::json!({
            "error": {
                "kind": self.kind,
                "exit_code": self.kind.exit_code(),
                "message": self.message,
            }
        });
        eprintln!("{body}");
        ExitCode::from(self.kind.exit_code())
    }
}

impl From<nflp::Error> for CliError {
    fn from(e: nflp::Error) -> Self {
        let kind = match e {
            // shape problems of the supplied data (too few rows, bad design)
            nflp::Error::InvalidArgument(_) => ErrorKind::Data,
            _ => ErrorKind::Numerical,
        };
        Self { kind, message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::data(e.to_string())
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
