//! The full training loop: collect a fixed-step rollout, estimate
//! advantages, then run several shuffled minibatch passes of clipped-
//! surrogate updates.
//!
//! Every random draw flows from streams derived off the config seed by role
//! (action noise, minibatch shuffling, per-episode environment seeds), so a
//! config determines the produced curve byte for byte. Baseline and encoder
//! runs with the same seed reseed their environments identically, episode by
//! episode, which keeps comparisons between representations paired.

use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use setpool_envs::{Environment, TerminalCause};
use setpool_nn::{
    derive_indexed_seed, derive_seed, seeded_rng, Checkpoint, Mat, ParamStore, Section, Tape,
};

use crate::adam::Adam;
use crate::config::TrainConfig;
use crate::error::{PpoError, Result};
use crate::gae::compute_gae;
use crate::loss::{normalize_advantages, ppo_loss_on_tape, LossBatch};
use crate::policy::GaussianPolicy;
use crate::repr::{Repr, ReprSpec};
use crate::rollout::{RolloutBatch, RolloutStep};

/// Per-epoch curve entry; epochs are numbered from 1.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub mean_return: f64,
    pub mean_episode_len: f64,
    pub policy_loss: f64,
    pub value_loss: f64,
}

/// Everything an experiment records about one training run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingCurve {
    pub seed: u64,
    pub records: Vec<EpochRecord>,
    /// Epoch at which the loss went non-finite, if training aborted.
    pub diverged_at: Option<usize>,
}

impl TrainingCurve {
    pub fn new(seed: u64) -> Self {
        Self { seed, records: Vec::new(), diverged_at: None }
    }

    pub fn mean_returns(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.mean_return).collect()
    }

    /// Serializes as delimited text with a header row. Floats use shortest
    /// round-trip formatting, making the output reproducible byte for byte.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("epoch,mean_return,mean_episode_len,policy_loss,value_loss,seed\n");
        for r in &self.records {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                r.epoch, r.mean_return, r.mean_episode_len, r.policy_loss, r.value_loss, self.seed
            )
            .expect("writing to a String cannot fail");
        }
        out
    }
}

/// Owns the parameters, optimizer state, and random streams of one run.
pub struct Trainer {
    store: ParamStore,
    policy: GaussianPolicy,
    repr: Repr,
    config: TrainConfig,
    adam: Adam,
    noise_rng: ChaCha8Rng,
    shuffle_rng: ChaCha8Rng,
    episodes_started: u64,
    epochs_run: usize,
    partial_return: f64,
    partial_len: u32,
    env_started: bool,
}

impl Trainer {
    /// Builds representation, actor, critic, and optimizer state for an
    /// environment with the given flat observation width. Action dimension is
    /// fixed at 2 to match the planar environments.
    pub fn new(repr_spec: &ReprSpec, flat_dim: usize, config: TrainConfig) -> Result<Self> {
        config.validate()?;
        let mut store = ParamStore::new();
        let repr = Repr::build(repr_spec, &mut store, flat_dim, config.seed)?;
        let policy =
            GaussianPolicy::init(&mut store, repr.dim(), 2, derive_seed(config.seed, "policy-init"))?;
        let adam = Adam::new(&store, config.learning_rate);
        let noise_rng = seeded_rng(derive_seed(config.seed, "action-noise"));
        let shuffle_rng = seeded_rng(derive_seed(config.seed, "minibatch-shuffle"));
        Ok(Self {
            store,
            policy,
            repr,
            config,
            adam,
            noise_rng,
            shuffle_rng,
            episodes_started: 0,
            epochs_run: 0,
            partial_return: 0.0,
            partial_len: 0,
            env_started: false,
        })
    }

    pub fn store(&self) -> &ParamStore {
        &self.store
    }

    pub fn policy(&self) -> &GaussianPolicy {
        &self.policy
    }

    pub fn repr(&self) -> &Repr {
        &self.repr
    }

    pub fn config(&self) -> &TrainConfig {
        &self.config
    }

    fn episode_seed(&self) -> u64 {
        derive_indexed_seed(self.config.seed, "episode", self.episodes_started)
    }

    /// Steps `env` for exactly `steps_per_epoch` transitions, resetting it
    /// whenever an episode ends. The first call seeds the environment;
    /// afterwards episodes continue across epoch boundaries.
    pub fn collect_epoch(&mut self, env: &mut dyn Environment) -> Result<RolloutBatch> {
        if !self.env_started {
            env.reset(self.episode_seed());
            self.episodes_started += 1;
            self.env_started = true;
            self.partial_return = 0.0;
            self.partial_len = 0;
        }
        let mut steps = Vec::with_capacity(self.config.steps_per_epoch);
        let mut completed_returns = Vec::new();
        let mut completed_lengths = Vec::new();
        for _ in 0..self.config.steps_per_epoch {
            let (observation, representation) = self.repr.observe(&self.store, env)?;
            let (mean, std) = self.policy.forward(&self.store, &representation)?;
            let (action, log_prob) =
                GaussianPolicy::sample_action(&mean, &std, &mut self.noise_rng);
            if !log_prob.is_finite() {
                return Err(PpoError::NonFinite { context: "sampled action log-probability" });
            }
            let value = self.policy.value(&self.store, &representation)?;
            let result = env.step([action[0], action[1]])?;
            self.partial_return += result.reward;
            self.partial_len += 1;
            // A time limit cuts the episode without being part of the task:
            // bootstrap the cut-off state's value so advantage estimation
            // stays consistent with the unlimited-horizon objective. Real
            // terminals ((non-)food contact, convoy resolution) stay at zero.
            let truncation_value = if result.info.terminal_cause == Some(TerminalCause::Timeout) {
                let (_, terminal_repr) = self.repr.observe(&self.store, env)?;
                Some(self.policy.value(&self.store, &terminal_repr)?)
            } else {
                None
            };
            steps.push(RolloutStep {
                observation,
                representation,
                action,
                log_prob,
                reward: result.reward,
                value,
                done: result.done,
                truncation_value,
            });
            if result.done {
                completed_returns.push(self.partial_return);
                completed_lengths.push(self.partial_len);
                self.partial_return = 0.0;
                self.partial_len = 0;
                env.reset(self.episode_seed());
                self.episodes_started += 1;
            }
        }
        let bootstrap_value = if steps.last().is_some_and(|s| s.done) {
            0.0
        } else {
            let (_, representation) = self.repr.observe(&self.store, env)?;
            self.policy.value(&self.store, &representation)?
        };
        Ok(RolloutBatch { steps, bootstrap_value, completed_returns, completed_lengths })
    }

    /// Runs the configured number of shuffled minibatch passes over `batch`
    /// and returns `(mean policy loss, mean value loss)` across minibatches.
    pub fn update_epoch(&mut self, batch: &RolloutBatch) -> Result<(f64, f64)> {
        if batch.is_empty() {
            return Err(PpoError::Config("cannot update on an empty rollout".into()));
        }
        let (mut advantages, returns) = compute_gae(
            &batch.gae_rewards(self.config.gamma),
            &batch.values(),
            &batch.dones(),
            batch.bootstrap_value,
            self.config.gamma,
            self.config.lambda,
        )?;
        normalize_advantages(&mut advantages);

        let action_dim = self.policy.action_dim();
        let mut policy_loss_sum = 0.0;
        let mut value_loss_sum = 0.0;
        let mut minibatches = 0usize;
        let mut indices: Vec<usize> = (0..batch.len()).collect();
        for _ in 0..self.config.update_passes {
            indices.shuffle(&mut self.shuffle_rng);
            for chunk in indices.chunks(self.config.minibatch) {
                let mut action_data = Vec::with_capacity(chunk.len() * action_dim);
                let mut old_log_probs = Vec::with_capacity(chunk.len());
                let mut chunk_adv = Vec::with_capacity(chunk.len());
                let mut chunk_ret = Vec::with_capacity(chunk.len());
                let mut observations = Vec::with_capacity(chunk.len());
                for &i in chunk {
                    let step = &batch.steps[i];
                    action_data.extend_from_slice(&step.action);
                    old_log_probs.push(step.log_prob);
                    chunk_adv.push(advantages[i]);
                    chunk_ret.push(returns[i]);
                    observations.push(&step.observation);
                }
                let actions = Mat::from_vec(chunk.len(), action_dim, action_data)?;

                let mut tape = Tape::new();
                let repr_node = self.repr.batch_node(&mut tape, &self.store, &observations)?;
                let nodes = ppo_loss_on_tape(
                    &mut tape,
                    &self.store,
                    &self.policy,
                    repr_node,
                    &LossBatch {
                        actions: &actions,
                        old_log_probs: &old_log_probs,
                        advantages: &chunk_adv,
                        returns: &chunk_ret,
                    },
                    self.config.clip_epsilon,
                    self.config.value_coef,
                )?;
                let gradients = tape.backward(nodes.total, &self.store)?;
                self.adam.step(&mut self.store, &gradients)?;
                policy_loss_sum += tape.value(nodes.policy_term).as_scalar()?;
                value_loss_sum += tape.value(nodes.value_term).as_scalar()?;
                minibatches += 1;
            }
        }
        self.epochs_run += 1;
        Ok((policy_loss_sum / minibatches as f64, value_loss_sum / minibatches as f64))
    }

    /// Full training: `epochs` × (collect + update), recording the curve.
    /// Numeric blow-up stops the run and stamps `diverged_at` instead of
    /// erroring, so batch experiments can continue with other seeds.
    pub fn train(&mut self, env: &mut dyn Environment) -> Result<TrainingCurve> {
        let mut curve = TrainingCurve::new(self.config.seed);
        for epoch in 1..=self.config.epochs {
            let outcome = self
                .collect_epoch(env)
                .and_then(|batch| Ok((self.update_epoch(&batch)?, batch)));
            let ((policy_loss, value_loss), batch) = match outcome {
                Ok(v) => v,
                Err(e) if e.is_divergence() => {
                    curve.diverged_at = Some(epoch);
                    break;
                }
                Err(e) => return Err(e),
            };
            curve.records.push(EpochRecord {
                epoch,
                mean_return: batch.mean_return(self.partial_return),
                mean_episode_len: batch.mean_episode_len(self.partial_len),
                policy_loss,
                value_loss,
            });
            if self.config.checkpoint_every > 0 && epoch % self.config.checkpoint_every == 0 {
                let dir = self.config.checkpoint_dir.clone().expect("validated with checkpoint_every");
                std::fs::create_dir_all(&dir).map_err(setpool_nn::NnError::from)?;
                self.save_checkpoint(&dir.join(format!("epoch-{epoch}.ckpt")))?;
            }
            if let Some(threshold) = self.config.stop_at_mean_return {
                let window = self.config.stop_window;
                if curve.records.len() >= window {
                    let tail = &curve.records[curve.records.len() - window..];
                    let avg = tail.iter().map(|r| r.mean_return).sum::<f64>() / window as f64;
                    if avg >= threshold {
                        break;
                    }
                }
            }
        }
        Ok(curve)
    }

    /// Writes actor, critic, log-std, and (when present) encoder parameters
    /// in the shared binary parameter format.
    pub fn save_checkpoint(&self, path: &Path) -> Result<()> {
        let mut ckpt = match self.repr.encoder() {
            Some(params) => params.to_checkpoint(&self.store),
            None => Checkpoint::new(),
        };
        ckpt.push(Section::from_mlp("policy", &self.store, self.policy.trunk()));
        ckpt.push(Section::from_mlp("critic", &self.store, self.policy.critic()));
        ckpt.push(Section::raw("log_std", vec![self.store.get(self.policy.log_std_id()).clone()]));
        ckpt.save_to_path(path).map_err(PpoError::from)
    }
}
