use thiserror::Error;

#[derive(Debug, Error)]
pub enum PpoError {
    #[error("invalid training config: {0}")]
    Config(String),

    #[error("sequence lengths disagree: {detail}")]
    LengthMismatch { detail: String },

    #[error("non-finite value in {context}")]
    NonFinite { context: &'static str },

    #[error(transparent)]
    Nn(#[from] setpool_nn::NnError),

    #[error(transparent)]
    Encoder(#[from] setpool_encoder::EncoderError),

    #[error(transparent)]
    Env(#[from] setpool_envs::EnvError),
}

pub type Result<T> = std::result::Result<T, PpoError>;

impl PpoError {
    /// True when the error signals numeric blow-up rather than misuse; the
    /// trainer records these as divergence instead of propagating them.
    pub fn is_divergence(&self) -> bool {
        matches!(
            self,
            PpoError::NonFinite { .. } | PpoError::Nn(setpool_nn::NnError::NonFinite(_))
        )
    }
}
