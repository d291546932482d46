use std::path::Path;

use serde_json::{json, Value};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: line {line}, column {column}: {message}")]
    Syntax { path: String, line: usize, column: usize, message: String },
    #[error("invalid `{field}`: {message}")]
    Validation { field: String, message: String },
    #[error(transparent)]
    Core(#[from] degenflow_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Validation { field: field.into(), message: message.into() }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.display().to_string(), source }
    }

    /// Machine-readable form printed on failure.
    pub fn to_json(&self) -> Value {
        let message = self.to_string();
        match self {
            CliError::Syntax { path, line, column, .. } => {
                json!({"error": "config_syntax", "message": message, "path": path, "line": line, "column": column})
            }
            CliError::Validation { field, .. } => {
                json!({"error": "config_validation", "message": message, "field": field})
            }
            CliError::Core(degenflow_core::Error::StepRejected { dt, admissible_dt }) => json!({
                "error": "step_rejected",
                "message": message,
                "dt": dt,
                "admissible_dt": admissible_dt,
            }),
            CliError::Core(_) => json!({"error": "solver", "message": message}),
            CliError::Io { path, .. } => json!({"error": "io", "message": message, "path": path}),
        }
    }
}
