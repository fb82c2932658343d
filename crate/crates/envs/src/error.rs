use thiserror::Error;

#[derive(Debug, Error)]
pub enum EnvError {
    #[error("episode is over; reset before stepping again")]
    EpisodeOver,

    #[error("action contains a non-finite component")]
    NonFiniteAction,

    #[error("invalid environment config: {0}")]
    InvalidConfig(String),

    #[error("baseline vector cannot hold {count} objects (capacity {max})")]
    BaselineOverflow { count: usize, max: usize },

    #[error("trajectory write failed: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, EnvError>;
