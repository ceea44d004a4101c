//! Library side of the `iet` command: the subcommands and harnesses, kept
//! here so tests can drive them without spawning processes.

pub mod checks;
pub mod commands;
pub mod harness;
pub mod perturb;
pub mod svg;

use iet_core::{ClassifyError, ConstructError, IoError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{kind}: {message}")]
    Dynamical { kind: &'static str, message: String },
    #[error("{0}")]
    Invariant(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Dynamical { .. } => 3,
            CliError::Invariant(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Parse(_) => "parse",
            CliError::Dynamical { kind, .. } => kind,
            CliError::Invariant(_) => "invariant",
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let message = match self {
            CliError::Dynamical { message, .. } => message.clone(),
            other => other.to_string(),
        };
        serde_json::json!({ "error": self.kind(), "message": message, "exit_code": self.exit_code() })
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        CliError::Parse(e.to_string())
    }
}

impl From<ConstructError> for CliError {
    fn from(e: ConstructError) -> Self {
        match e {
            ConstructError::InvalidCounts { .. } | ConstructError::TooLarge(_) => CliError::Parse(e.to_string()),
            _ => CliError::Invariant(e.to_string()),
        }
    }
}

impl From<ClassifyError> for CliError {
    fn from(e: ClassifyError) -> Self {
        let message = e.to_string();
        if e.is_tie() {
            CliError::Dynamical { kind: "tie", message }
        } else if e.is_cap() {
            CliError::Dynamical { kind: "cap", message }
        } else {
            match e {
                ClassifyError::DegenerateBlock { .. } => CliError::Dynamical { kind: "degenerate", message },
                ClassifyError::BoundViolated { .. } => CliError::Invariant(message),
                _ => CliError::Parse(message),
            }
        }
    }
}
