use std::path::PathBuf;

use serde_json::json;
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_ACCEPTANCE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config file not found: {}", .0.display())]
    MissingConfig(PathBuf),
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error("usage: {0}")]
    Usage(String),
    #[error("{failed} acceptance criteria failed")]
    Acceptance { failed: usize },
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::MissingConfig(_) => "missing_config",
            Self::Parse(_) => "parse",
            Self::Validation(_) => "validation",
            Self::Usage(_) => "usage",
            Self::Acceptance { .. } => "acceptance",
            Self::Io(_) => "io",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Parse(_) | Self::Validation(_) | Self::Usage(_) => EXIT_VALIDATION,
            Self::Acceptance { .. } => EXIT_ACCEPTANCE,
            Self::MissingConfig(_) | Self::Io(_) => EXIT_IO,
        }
    }

    /// One-line JSON record for stderr.
    pub fn record(&self) -> String {
        json!({
            "error": self.kind(),
            "message": self.to_string(),
            "exit_code": self.exit_code(),
        })
        .to_string()
    }
}

impl From<rydnet::Error> for CliError {
    fn from(e: rydnet::Error) -> Self {
        Self::Validation(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Self::Io(e.to_string())
    }
}
