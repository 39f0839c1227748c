use std::fmt;

use gcqw_core::WalkError;
use serde_json::{json, Value};

/// Failure classes, each with its own exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Parameter,
    Validation,
    Budget,
    Io,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Parameter => 1,
            ErrorKind::Io => 1,
            ErrorKind::Validation => 3,
            ErrorKind::Budget => 4,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorKind::Parameter => "parameter",
            ErrorKind::Validation => "validation",
            ErrorKind::Budget => "budget",
            ErrorKind::Io => "io",
        }
    }
}

#[derive(Debug, Clone)]
pub struct CliError {
    pub kind: ErrorKind,
    pub code: &'static str,
    pub message: String,
    pub detail: Value,
}

impl CliError {
    pub fn new(kind: ErrorKind, code: &'static str, message: impl Into<String>) -> Self {
        Self {
            kind,
            code,
            message: message.into(),
            detail: Value::Null,
        }
    }

    pub fn with_detail(mut self, detail: Value) -> Self {
        self.detail = detail;
        self
    }

    pub fn parameter(message: impl Into<String>) -> Self {
        Self::new(ErrorKind::Parameter, "invalid_parameter", message)
    }

    /// One-line JSON diagnostic for stderr.
    pub fn diagnostic(&self) -> String {
        json!({
            "error": self.kind.as_str(),
            "code": self.code,
            "message": self.message,
            "detail": self.detail,
        })
        .to_string()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind.as_str(), self.message)
    }
}

impl std::error::Error for CliError {}

impl From<WalkError> for CliError {
    fn from(e: WalkError) -> Self {
        let message = e.to_string();
        match e {
            WalkError::Leakage { leakage, required } => {
                CliError::new(ErrorKind::Validation, "leakage", message)
                    .with_detail(json!({ "leakage": leakage, "required_n_max": required }))
            }
            WalkError::NormDrift { drift, limit } => {
                CliError::new(ErrorKind::Validation, "norm_drift", message)
                    .with_detail(json!({ "drift": drift, "limit": limit }))
            }
            WalkError::StepDoubling { delta, limit } => {
                CliError::new(ErrorKind::Validation, "step_doubling", message)
                    .with_detail(json!({ "delta": delta, "limit": limit }))
            }
            WalkError::Eigensolver { block } => {
                CliError::new(ErrorKind::Validation, "eigensolver", message)
                    .with_detail(json!({ "block": block }))
            }
            WalkError::Wraparound { t, half, n } => {
                CliError::new(ErrorKind::Parameter, "wraparound", message)
                    .with_detail(json!({ "t": t, "half": half, "n": n }))
            }
            WalkError::NotNormalized { norm, tolerance } => {
                CliError::new(ErrorKind::Parameter, "not_normalized", message)
                    .with_detail(json!({ "norm": norm, "tolerance": tolerance }))
            }
            _ => CliError::parameter(message),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::new(ErrorKind::Io, "io", e.to_string())
    }
}
