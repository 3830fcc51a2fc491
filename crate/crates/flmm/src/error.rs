use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{0}")]
    Validation(String),

    #[error(transparent)]
    Core(#[from] flmm_core::Error),

    #[error("{context}: {source}")]
    Numerical {
        context: String,
        source: flmm_core::Error,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },

    #[error("{}: {source}", path.display())]
    Csv { path: PathBuf, source: csv::Error },

    #[error("{failed} of {total} convergence columns failed")]
    PartialFailure { failed: usize, total: usize },
}

impl HarnessError {
    pub fn validation(msg: impl Into<String>) -> Self {
        HarnessError::Validation(msg.into())
    }

    /// Wraps a core error with context, keeping its numerical/validation class.
    pub fn solver(context: impl Into<String>, source: flmm_core::Error) -> Self {
        if source.is_numerical() {
            HarnessError::Numerical {
                context: context.into(),
                source,
            }
        } else {
            HarnessError::Validation(format!("{}: {source}", context.into()))
        }
    }

    /// 2 for bad input, 3 for numerical failure, 1 for IO.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Validation(_) => 2,
            HarnessError::Core(e) if e.is_numerical() => 3,
            HarnessError::Core(_) => 2,
            HarnessError::Numerical { .. } | HarnessError::PartialFailure { .. } => 3,
            HarnessError::Io { .. } | HarnessError::Json { .. } | HarnessError::Csv { .. } => 1,
        }
    }
}
