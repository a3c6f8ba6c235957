use duplexnet_core::Error as CoreError;

/// Failure of a run, mapped one-to-one onto the process exit code.
#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure at {point}: {source}")]
    Numerical {
        point: String,
        #[source]
        source: CoreError,
    },
    #[error("validation failed: {0}")]
    Validation(String),
}

impl RunError {
    pub fn config(msg: impl Into<String>) -> Self {
        RunError::Config(msg.into())
    }

    pub fn numerical(point: impl std::fmt::Display, source: CoreError) -> Self {
        RunError::Numerical {
            point: point.to_string(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 1,
            RunError::Numerical { .. } => 2,
            RunError::Validation(_) => 3,
        }
    }
}
