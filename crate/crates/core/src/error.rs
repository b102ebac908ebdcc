use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = DanteError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum DanteError {
    #[error("{path}: line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("data consistency: {0}")]
    Consistency(String),

    #[error("duplicate observation for region {region}, year {year}, week {week}")]
    Duplicate {
        region: String,
        year: i32,
        week: u32,
    },

    #[error("invalid weights: {0}")]
    Weights(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("undefined target: {0}")]
    UndefinedTarget(String),

    #[error("invalid distribution: {0}")]
    Distribution(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl DanteError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        DanteError::Io {
            path: path.into(),
            source,
        }
    }

    /// Whether the failure came from the numerics rather than the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(self, DanteError::Numerical(_))
    }
}
