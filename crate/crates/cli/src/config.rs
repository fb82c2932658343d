//! Experiment configuration: one TOML file describes a full batch run.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use setpool_encoder::{ClassSpec, EncoderSpec};
use setpool_envs::{ConvoyEnv, Environment, ScavengerEnv, ScavengerTask};
use setpool_ppo::{ReprSpec, TrainConfig};

use crate::error::{HarnessError, Result};

/// Which benchmark the experiment trains on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskId {
    /// Food-only scavenging; one object class.
    Scavenger1,
    /// Food and poison; two object classes.
    Scavenger2,
    /// Convoy escort with a varying attacker population.
    Convoy,
}

impl TaskId {
    pub fn as_str(self) -> &'static str {
        match self {
            TaskId::Scavenger1 => "scavenger1",
            TaskId::Scavenger2 => "scavenger2",
            TaskId::Convoy => "convoy",
        }
    }

    /// Whether a greedy reference return is defined for this task.
    pub fn has_greedy_reference(self) -> bool {
        matches!(self, TaskId::Scavenger1 | TaskId::Scavenger2)
    }
}

/// State representation fed to the policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReprKind {
    Baseline,
    Encoder,
}

impl ReprKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ReprKind::Baseline => "baseline",
            ReprKind::Encoder => "encoder",
        }
    }
}

/// Per-class encoder sizing, applied uniformly to every object class of the
/// chosen task.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EncoderConfig {
    pub abstract_dim: usize,
    pub filter_hidden: Vec<usize>,
    pub abstraction_hidden: Vec<usize>,
}

impl Default for EncoderConfig {
    fn default() -> Self {
        Self { abstract_dim: 16, filter_hidden: vec![64], abstraction_hidden: vec![64] }
    }
}

/// A complete experiment: task, representation, seeds, training recipe, and
/// reporting knobs. Every field except `task` has a default.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub task: TaskId,
    #[serde(default = "default_object_count")]
    pub object_count: usize,
    #[serde(default = "default_representation")]
    pub representation: ReprKind,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// "Solved" bar as a fraction of the greedy reference return.
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    #[serde(default = "default_greedy_episodes")]
    pub greedy_episodes: usize,
    #[serde(default = "default_greedy_seed")]
    pub greedy_seed: u64,
    /// Stop a run once its moving-average return clears the threshold.
    #[serde(default = "default_early_stop")]
    pub early_stop: bool,
    #[serde(default)]
    pub encoder: EncoderConfig,
    #[serde(default)]
    pub train: TrainConfig,
}

fn default_object_count() -> usize {
    3
}
fn default_representation() -> ReprKind {
    ReprKind::Baseline
}
fn default_seeds() -> Vec<u64> {
    vec![0, 1, 2, 3, 4]
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("runs")
}
fn default_threshold() -> f64 {
    0.8
}
fn default_greedy_episodes() -> usize {
    1000
}
fn default_greedy_seed() -> u64 {
    9001
}
fn default_early_stop() -> bool {
    true
}

impl ExperimentConfig {
    /// Parses and validates a TOML config file. Parse failures carry the
    /// offending field path in the message.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        let config: ExperimentConfig = toml::from_str(&text)
            .map_err(|e| HarnessError::Config { path: path.into(), detail: e.message().to_string() })?;
        config
            .validate()
            .map_err(|e| match e {
                HarnessError::Config { detail, .. } => {
                    HarnessError::Config { path: path.into(), detail }
                }
                other => other,
            })?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |detail: String| {
            Err(HarnessError::Config { path: PathBuf::from("<config>"), detail })
        };
        if self.seeds.is_empty() {
            return fail("seeds: at least one seed is required".into());
        }
        if self.object_count == 0 {
            return fail("object_count: must be at least 1".into());
        }
        if !(self.threshold > 0.0 && self.threshold <= 1.0) {
            return fail(format!("threshold: must lie in (0, 1], got {}", self.threshold));
        }
        if self.greedy_episodes == 0 {
            return fail("greedy_episodes: must be at least 1".into());
        }
        if self.encoder.abstract_dim == 0 {
            return fail("encoder.abstract_dim: must be at least 1".into());
        }
        if let Err(e) = self.train.validate() {
            return fail(format!("train: {e}"));
        }
        Ok(())
    }

    /// Fresh environment for this task, seeded.
    pub fn make_env(&self, seed: u64) -> Result<Box<dyn Environment>> {
        Ok(match self.task {
            TaskId::Scavenger1 => {
                Box::new(ScavengerEnv::new(ScavengerTask::FoodOnly, self.object_count, seed)?)
            }
            TaskId::Scavenger2 => {
                Box::new(ScavengerEnv::new(ScavengerTask::FoodAndPoison, self.object_count, seed)?)
            }
            TaskId::Convoy => Box::new(ConvoyEnv::new(seed)),
        })
    }

    /// Encoder layout for this task: one [`ClassSpec`] per object class plus
    /// the unpooled ego width.
    pub fn encoder_spec(&self) -> Result<EncoderSpec> {
        let class = |input_dim: usize| ClassSpec {
            input_dim,
            abstract_dim: self.encoder.abstract_dim,
            filter_hidden: self.encoder.filter_hidden.clone(),
            abstraction_hidden: self.encoder.abstraction_hidden.clone(),
        };
        let (classes, ego_dim) = match self.task {
            TaskId::Scavenger1 => (vec![class(2)], 2),
            TaskId::Scavenger2 => (vec![class(2), class(2)], 2),
            TaskId::Convoy => (vec![class(2), class(2)], 3),
        };
        Ok(EncoderSpec::new(classes, ego_dim)?)
    }

    pub fn repr_spec(&self) -> Result<ReprSpec> {
        Ok(match self.representation {
            ReprKind::Baseline => ReprSpec::Baseline,
            ReprKind::Encoder => ReprSpec::Encoder(self.encoder_spec()?),
        })
    }

    /// File-name stem for artifacts of this config.
    pub fn slug(&self) -> String {
        format!("{}-m{}-{}", self.task.as_str(), self.object_count, self.representation.as_str())
    }
}
