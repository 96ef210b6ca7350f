use std::fmt;
use std::path::Path;

use qmeasure::analysis::AnalysisError;
use qmeasure::{HistoryError, OpticsError};
use serde_json::json;

/// A failure with a stable machine-readable code.
#[derive(Debug)]
pub struct CliError {
    pub code: String,
    pub message: String,
}

impl CliError {
    pub fn new(code: impl Into<String>, message: impl Into<String>) -> Self {
        CliError {
            code: code.into(),
            message: message.into(),
        }
    }

    pub fn io(path: &Path, err: impl fmt::Display) -> Self {
        CliError::new("io", format!("{}: {err}", path.display()))
    }

    pub fn parse(path: &Path, err: &serde_json::Error) -> Self {
        CliError::new(
            "parse",
            format!(
                "{}: line {}, column {}: {err}",
                path.display(),
                err.line(),
                err.column()
            ),
        )
    }

    pub fn envelope(&self) -> serde_json::Value {
        json!({ "error": { "code": self.code, "message": self.message } })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}

impl From<HistoryError> for CliError {
    fn from(e: HistoryError) -> Self {
        CliError::new(e.code(), e.to_string())
    }
}

impl From<OpticsError> for CliError {
    fn from(e: OpticsError) -> Self {
        CliError::new(e.code(), e.to_string())
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        CliError::new(e.code(), e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
