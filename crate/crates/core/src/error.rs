use std::path::PathBuf;

use thiserror::Error;

/// Errors raised while building or running a simulation.
#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid value for `{field}`: {reason}")]
    InvalidParam { field: &'static str, reason: String },

    #[error("cannot place {requested} base stations on {available} rooftops")]
    InsufficientRooftops { requested: usize, available: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error("missing column `{0}` in input csv")]
    MissingColumn(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl SimError {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        SimError::InvalidParam {
            field,
            reason: reason.into(),
        }
    }

    /// Configuration and parameter problems, as opposed to runtime failures.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            SimError::InvalidParam { .. }
                | SimError::Config(_)
                | SimError::Json(_)
                | SimError::InsufficientRooftops { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, SimError>;
