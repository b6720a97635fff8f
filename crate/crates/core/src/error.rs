//! Crate-wide error type.

use crate::gateway::StageTag;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Invalid input: bad paths, malformed files, contract violations.
    #[error("input error: {0}")]
    Input(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    /// Live backend failed after exhausting retries.
    #[error("backend error after {attempts} attempt(s): {message}")]
    Backend { message: String, attempts: u32 },

    /// Mock script had no matching rule and no default response.
    #[error("mock script error: {0}")]
    Script(String),

    /// A pipeline stage could not produce a usable output.
    #[error("stage {stage} failed: {message}")]
    Stage { stage: StageTag, message: String },

    #[error("training error: {0}")]
    Train(String),
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn stage(stage: StageTag, msg: impl Into<String>) -> Self {
        Error::Stage {
            stage,
            message: msg.into(),
        }
    }

    /// Errors that indicate bad user input rather than a runtime failure.
    pub fn is_input(&self) -> bool {
        matches!(self, Error::Input(_) | Error::Json(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
