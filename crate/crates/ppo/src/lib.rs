//! Clipped policy-gradient training over flat or set-encoded states.
//!
//! The pieces compose in the usual order: a [`GaussianPolicy`] (actor +
//! critic + learned log-std) acts in an environment through a [`Repr`] that
//! is either the environment's zero-padded flat vector or the attention
//! pooling encoder; [`compute_gae`] turns collected rollouts into advantage
//! estimates; [`ppo_loss_on_tape`] records the clipped surrogate plus value
//! error for reverse-mode differentiation; [`Adam`] applies the updates; and
//! [`Trainer`] orchestrates epochs into a [`TrainingCurve`].
//!
//! When the encoder representation is active its parameters live in the same
//! [`ParamStore`](setpool_nn::ParamStore) as the policy's and receive
//! gradients from the same loss — there is no separate encoder objective.

mod adam;
mod config;
mod error;
mod gae;
mod loss;
mod policy;
mod repr;
mod rollout;
mod train;

pub use adam::Adam;
pub use config::TrainConfig;
pub use error::{PpoError, Result};
pub use gae::compute_gae;
pub use loss::{normalize_advantages, ppo_loss_on_tape, LossBatch, LossNodes};
pub use policy::{
    log_prob, GaussianPolicy, HIDDEN_LAYERS, HIDDEN_WIDTH, LOG_STD_INIT, LOG_STD_MAX, LOG_STD_MIN,
};
pub use repr::{Repr, ReprSpec};
pub use rollout::{Observation, RolloutBatch, RolloutStep};
pub use train::{EpochRecord, Trainer, TrainingCurve};
