use setpool_nn::NnError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EncoderError {
    #[error("{0} requires at least one object")]
    EmptyClass(&'static str),

    #[error("state has {got} object classes, encoder expects {expected}")]
    ClassCountMismatch { expected: usize, got: usize },

    #[error("class {class}: objects have dimension {got}, encoder expects {expected}")]
    ObjectDimMismatch { class: usize, expected: usize, got: usize },

    #[error("ego vector has dimension {got}, encoder expects {expected}")]
    EgoDimMismatch { expected: usize, got: usize },

    #[error("upstream gradient has length {got}, encoder output has length {expected}")]
    UpstreamDimMismatch { expected: usize, got: usize },

    #[error("invalid encoder spec: {0}")]
    InvalidSpec(String),

    #[error(transparent)]
    Nn(#[from] NnError),
}

pub type Result<T> = std::result::Result<T, EncoderError>;
