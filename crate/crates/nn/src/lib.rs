//! Small dense-matrix neural network toolkit with tape-based reverse-mode
//! differentiation.
//!
//! The crate provides exactly what the rest of the workspace needs and no
//! more: a row-major [`Mat`] type, fully connected networks ([`Mlp`]) whose
//! batched forward pass never mixes rows, a numerically stable
//! [`softmax_column`], an operation [`Tape`] that differentiates composite
//! losses with respect to parameters held in a [`ParamStore`], binary
//! [`Checkpoint`]s with byte-exact round trips, and deterministic seeded
//! randomness.

mod activation;
mod checkpoint;
mod error;
mod mat;
mod mlp;
mod seed;
mod softmax;
mod store;
mod tape;

pub use activation::{activation_forward, Activation, DEFAULT_LEAK_SLOPE};
pub use checkpoint::{Checkpoint, Section, SectionKind};
pub use error::{NnError, Result};
pub use mat::Mat;
pub use mlp::{affine_forward, mlp_forward, Mlp, MlpSpec};
pub use seed::{derive_indexed_seed, derive_seed, seeded_rng, standard_normal};
pub use softmax::softmax_column;
pub use store::{ParamId, ParamStore};
pub use tape::{Gradients, NodeId, Tape};
