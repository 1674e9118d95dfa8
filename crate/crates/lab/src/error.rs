use std::fmt;
use std::path::PathBuf;

use serde_json::json;

/// A configuration problem, tied to a key or a line where possible.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub key: Option<String>,
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    pub fn key(key: &str, message: &str) -> Self {
        Self { key: Some(key.to_string()), line: None, message: message.to_string() }
    }

    pub fn syntax(line: usize, message: &str) -> Self {
        Self { key: None, line: Some(line), message: message.to_string() }
    }

    pub fn at(mut self, line: usize) -> Self {
        self.line = Some(line);
        self
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.key, self.line) {
            (Some(k), Some(l)) => write!(f, "`{k}` (line {l}): {}", self.message),
            (Some(k), None) => write!(f, "`{k}`: {}", self.message),
            (None, Some(l)) => write!(f, "line {l}: {}", self.message),
            (None, None) => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("{stage}: {source}")]
    Module { stage: &'static str, source: kds_core::Error },
    /// A run finished but its outcome check failed, as in a failed
    /// certification.
    #[error("{stage}: {message}")]
    Check { stage: &'static str, message: String },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

impl LabError {
    pub fn module(stage: &'static str) -> impl FnOnce(kds_core::Error) -> LabError {
        move |source| LabError::Module { stage, source }
    }

    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> LabError {
        let path = path.into();
        move |source| LabError::Io { path, source }
    }

    /// Process exit status: 2 for configuration errors, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Config(_) => 2,
            _ => 1,
        }
    }

    /// The single-line JSON record printed on failure.
    pub fn record(&self) -> String {
        let value = match self {
            LabError::Config(e) => json!({
                "status": "config error",
                "key": e.key,
                "line": e.line,
                "message": e.message,
            }),
            LabError::Module { stage, source } => json!({
                "status": "module error",
                "stage": stage,
                "message": source.to_string(),
            }),
            LabError::Check { stage, message } => json!({
                "status": "check failed",
                "stage": stage,
                "message": message,
            }),
            LabError::Io { path, source } => json!({
                "status": "io error",
                "path": path.display().to_string(),
                "message": source.to_string(),
            }),
        };
        value.to_string()
    }
}

pub type LabResult<T> = Result<T, LabError>;
