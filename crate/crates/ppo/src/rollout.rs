//! Experience storage for one training epoch.

use setpool_encoder::ObjectSet;

/// State as captured from the environment, in whichever form the active
/// representation consumes.
#[derive(Debug, Clone)]
pub enum Observation {
    Flat(Vec<f64>),
    Set(ObjectSet),
}

/// One environment transition plus everything the update needs to revisit it.
#[derive(Debug, Clone)]
pub struct RolloutStep {
    /// Raw observation, kept so set-encoded states can be re-encoded on the
    /// tape during updates.
    pub observation: Observation,
    /// Representation vector as computed at collection time.
    pub representation: Vec<f64>,
    pub action: Vec<f64>,
    /// Log density of `action` under the collection-time policy.
    pub log_prob: f64,
    pub reward: f64,
    /// Critic estimate of the pre-step state at collection time.
    pub value: f64,
    pub done: bool,
    /// Critic estimate of the post-step state when the episode was cut by a
    /// time limit rather than a real terminal. Time limits are not part of
    /// the task's reward structure, so advantage estimation bootstraps
    /// through them instead of treating them as zero-value ends.
    pub truncation_value: Option<f64>,
}

/// A fixed-length batch of consecutive steps, possibly spanning several
/// episodes and ending mid-episode.
#[derive(Debug, Clone)]
pub struct RolloutBatch {
    pub steps: Vec<RolloutStep>,
    /// Critic estimate of the state after the final step; zero when that step
    /// terminated its episode.
    pub bootstrap_value: f64,
    /// Undiscounted returns of episodes that finished inside this batch.
    pub completed_returns: Vec<f64>,
    /// Lengths of those episodes, aligned with `completed_returns`.
    pub completed_lengths: Vec<u32>,
}

impl RolloutBatch {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn rewards(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.reward).collect()
    }

    /// Rewards as seen by advantage estimation: at time-limit truncations the
    /// discounted critic value of the cut-off state is folded into the final
    /// reward, so the value chain continues through the artificial boundary.
    /// Reported episode returns always use the raw rewards.
    pub fn gae_rewards(&self, gamma: f64) -> Vec<f64> {
        self.steps
            .iter()
            .map(|s| match s.truncation_value {
                Some(v) => s.reward + gamma * v,
                None => s.reward,
            })
            .collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.value).collect()
    }

    pub fn dones(&self) -> Vec<bool> {
        self.steps.iter().map(|s| s.done).collect()
    }

    /// Mean return of completed episodes; falls back to the running partial
    /// return when the batch is shorter than one episode.
    pub fn mean_return(&self, partial_return: f64) -> f64 {
        if self.completed_returns.is_empty() {
            partial_return
        } else {
            self.completed_returns.iter().sum::<f64>() / self.completed_returns.len() as f64
        }
    }

    pub fn mean_episode_len(&self, partial_len: u32) -> f64 {
        if self.completed_lengths.is_empty() {
            f64::from(partial_len)
        } else {
            self.completed_lengths.iter().map(|&l| f64::from(l)).sum::<f64>()
                / self.completed_lengths.len() as f64
        }
    }

    /// Copy of the batch with one class's object rows permuted in every
    /// set-valued observation, `perm_for(step_index, row_count)` choosing the
    /// permutation. States whose class has other cardinality than the
    /// permutation are left untouched. Supports relabeling-invariance tests.
    pub fn with_permuted_class(
        &self,
        class: usize,
        mut perm_for: impl FnMut(usize, usize) -> Vec<usize>,
    ) -> Self {
        let mut out = self.clone();
        for (idx, step) in out.steps.iter_mut().enumerate() {
            if let Observation::Set(set) = &step.observation {
                let rows = set.class(class).rows();
                if rows > 1 {
                    let perm = perm_for(idx, rows);
                    step.observation = Observation::Set(set.with_permuted_class(class, &perm));
                }
            }
        }
        out
    }
}
