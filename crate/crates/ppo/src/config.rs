//! Training hyperparameters.

use serde::{Deserialize, Serialize};
use std::path::PathBuf;

use crate::error::{PpoError, Result};

/// Everything the trainer needs besides the environment and representation.
///
/// Defaults follow the reference recipe: 1000-step epochs, 256-step
/// minibatches, 4 update passes, clip 0.1, γ=0.99, λ=0.9, Adam at 3e-4, a
/// halved value loss, and no entropy bonus.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub epochs: usize,
    pub steps_per_epoch: usize,
    pub minibatch: usize,
    pub clip_epsilon: f64,
    pub gamma: f64,
    pub lambda: f64,
    /// Must stay 0.0: the objective deliberately has no entropy term, and the
    /// field exists only so configs can state that explicitly.
    pub entropy_coef: f64,
    pub learning_rate: f64,
    pub update_passes: usize,
    pub value_coef: f64,
    pub seed: u64,
    /// Write a parameter checkpoint every this many epochs; 0 disables.
    pub checkpoint_every: usize,
    /// Directory for periodic checkpoints; required when `checkpoint_every > 0`.
    pub checkpoint_dir: Option<PathBuf>,
    /// Stop once the moving average of mean returns over `stop_window`
    /// epochs reaches this value.
    pub stop_at_mean_return: Option<f64>,
    pub stop_window: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 1000,
            steps_per_epoch: 1000,
            minibatch: 256,
            clip_epsilon: 0.1,
            gamma: 0.99,
            lambda: 0.9,
            entropy_coef: 0.0,
            learning_rate: 3e-4,
            update_passes: 4,
            value_coef: 0.5,
            seed: 0,
            checkpoint_every: 0,
            checkpoint_dir: None,
            stop_at_mean_return: None,
            stop_window: 50,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(PpoError::Config(msg));
        if self.steps_per_epoch == 0 {
            return fail("steps_per_epoch must be positive".into());
        }
        if self.minibatch == 0 || self.minibatch > self.steps_per_epoch {
            return fail(format!(
                "minibatch must be in 1..={} (steps_per_epoch), got {}",
                self.steps_per_epoch, self.minibatch
            ));
        }
        if !(self.clip_epsilon > 0.0) {
            return fail(format!("clip_epsilon must be positive, got {}", self.clip_epsilon));
        }
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return fail(format!("gamma must satisfy 0 < gamma <= 1, got {}", self.gamma));
        }
        if !(self.lambda >= 0.0 && self.lambda <= 1.0) {
            return fail(format!("lambda must satisfy 0 <= lambda <= 1, got {}", self.lambda));
        }
        if self.entropy_coef != 0.0 {
            return fail(format!(
                "entropy_coef must be 0 (no entropy bonus is implemented), got {}",
                self.entropy_coef
            ));
        }
        if !(self.learning_rate > 0.0) {
            return fail(format!("learning_rate must be positive, got {}", self.learning_rate));
        }
        if self.update_passes == 0 {
            return fail("update_passes must be positive".into());
        }
        if !(self.value_coef >= 0.0) {
            return fail(format!("value_coef must be non-negative, got {}", self.value_coef));
        }
        if self.stop_window == 0 {
            return fail("stop_window must be positive".into());
        }
        if self.checkpoint_every > 0 && self.checkpoint_dir.is_none() {
            return fail("checkpoint_every is set but checkpoint_dir is missing".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        TrainConfig::default().validate().unwrap();
    }

    #[test]
    fn out_of_range_fields_are_rejected() {
        for patch in [
            &mut |c: &mut TrainConfig| c.gamma = 0.0,
            &mut |c: &mut TrainConfig| c.gamma = 1.5,
            &mut |c: &mut TrainConfig| c.lambda = -0.1,
            &mut |c: &mut TrainConfig| c.clip_epsilon = 0.0,
            &mut |c: &mut TrainConfig| c.entropy_coef = 0.01,
            &mut |c: &mut TrainConfig| c.minibatch = 0,
            &mut |c: &mut TrainConfig| c.minibatch = 2000,
            &mut |c: &mut TrainConfig| c.learning_rate = 0.0,
            &mut |c: &mut TrainConfig| c.update_passes = 0,
            &mut |c: &mut TrainConfig| c.checkpoint_every = 10,
        ] as [&mut dyn FnMut(&mut TrainConfig); 10]
        {
            let mut config = TrainConfig::default();
            patch(&mut config);
            assert!(config.validate().is_err(), "config should be invalid: {config:?}");
        }
    }
}
