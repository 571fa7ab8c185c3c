//! Batch front end for the `folm` loop-mirror simulator: configuration
//! files, parameter sweeps, result tables and a self-check suite.

pub mod config;
pub mod runner;
pub mod selfcheck;
pub mod table;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid `{field}`: {reason}")]
    Validation { field: String, reason: String },
    #[error("numerical guard: {0}")]
    Numerical(String),
    #[error("{failed} self-check(s) failed")]
    CheckFailed { failed: usize },
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 0 success, 1 validation or I/O, 2 numerical guard, 3 self-check failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation { .. } | CliError::Io(_) | CliError::Csv(_) | CliError::Json(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::CheckFailed { .. } => 3,
        }
    }

    /// Adds the offending sweep point to the message.
    pub fn at_point(self, point: &str) -> Self {
        if point.is_empty() {
            return self;
        }
        match self {
            CliError::Validation { field, reason } => CliError::Validation {
                field,
                reason: format!("{reason} (at {point})"),
            },
            CliError::Numerical(msg) => CliError::Numerical(format!("{msg} (at {point})")),
            other => other,
        }
    }
}

impl From<folm::Error> for CliError {
    fn from(e: folm::Error) -> Self {
        match e {
            folm::Error::InvalidParameter { field, reason } => CliError::Validation { field, reason },
            folm::Error::UnknownLabel(label) => CliError::Validation {
                field: "polarization.input".into(),
                reason: format!("unknown SOP label `{label}`"),
            },
            other => CliError::Numerical(other.to_string()),
        }
    }
}
