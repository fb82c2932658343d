use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config {path}: {detail}")]
    Config { path: PathBuf, detail: String },

    #[error("{0}")]
    InvalidArgument(String),

    #[error("{path}:{line}: {detail}")]
    Csv { path: PathBuf, line: usize, detail: String },

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Train(#[from] setpool_ppo::PpoError),

    #[error(transparent)]
    Env(#[from] setpool_envs::EnvError),

    #[error(transparent)]
    Encoder(#[from] setpool_encoder::EncoderError),

    #[error(transparent)]
    Nn(#[from] setpool_nn::NnError),
}

pub type Result<T> = std::result::Result<T, HarnessError>;

impl HarnessError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io { path: path.into(), source }
    }

    /// Stable machine-readable tag for the CLI's JSON error line.
    pub fn kind(&self) -> &'static str {
        match self {
            HarnessError::Config { .. } => "config",
            HarnessError::InvalidArgument(_) => "argument",
            HarnessError::Csv { .. } => "csv",
            HarnessError::Io { .. } => "io",
            HarnessError::Train(_) => "train",
            HarnessError::Env(_) => "environment",
            HarnessError::Encoder(_) => "encoder",
            HarnessError::Nn(_) => "numeric",
        }
    }
}
