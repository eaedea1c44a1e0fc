use std::path::PathBuf;

use rcslab::qasm::QasmError;
use rcslab::sim::SimError;
use thiserror::Error;

/// Every failure the harness can report, grouped by process exit code.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{0}")]
    Qasm(String),
    #[error("config: {0}")]
    Config(String),
    #[error("{path}: {message}")]
    Format { path: String, message: String },
    #[error(transparent)]
    Capacity(SimError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("scoring: {0}")]
    Scoring(String),
    #[error("{0}")]
    Internal(String),
}

impl HarnessError {
    /// Stable process exit code for this failure class.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Qasm(_) | HarnessError::Config(_) | HarnessError::Format { .. } => 2,
            HarnessError::Capacity(_) => 3,
            HarnessError::Io { .. } => 4,
            HarnessError::Scoring(_) => 5,
            HarnessError::Internal(_) => 1,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io { path: path.into(), source }
    }

    /// Renders QASM diagnostics against `file` as `file:line:col: severity: message` lines.
    pub fn from_qasm(file: &str, err: QasmError) -> Self {
        match err {
            QasmError::Parse(diags) => {
                let lines: Vec<String> = diags.iter().map(|d| d.render(file)).collect();
                HarnessError::Qasm(lines.join("\n"))
            }
            QasmError::Lower(e) => HarnessError::Qasm(format!("{file}: {e}")),
        }
    }
}

impl From<SimError> for HarnessError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Capacity { .. } | SimError::Allocation { .. } => HarnessError::Capacity(e),
            other => HarnessError::Internal(other.to_string()),
        }
    }
}

impl From<rcslab::xeb::XebError> for HarnessError {
    fn from(e: rcslab::xeb::XebError) -> Self {
        match e {
            rcslab::xeb::XebError::Sim(s) => s.into(),
            other => HarnessError::Scoring(other.to_string()),
        }
    }
}
