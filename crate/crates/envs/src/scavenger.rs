//! Food-collection navigation tasks on the square [-1, 1]^2.
//!
//! The agent starts at the center and steers a velocity-limited point toward
//! uniformly scattered food particles. The two-class variant adds an equal
//! number of poison particles that end the episode with a penalty on contact.
//! Observations are relative offsets to each particle plus the absolute ego
//! position; particles themselves never move.

use rand::Rng;
use setpool_encoder::ObjectSet;
use setpool_nn::{seeded_rng, Mat};

use crate::error::{EnvError, Result};
use crate::types::{Environment, StepInfo, StepResult, TerminalCause};

/// Half-extent of the square world.
pub const WORLD_HALF: f64 = 1.0;
/// Maximum displacement per step (time-step interval folded in).
pub const MAX_STEP: f64 = 0.05;
/// Contact distance for both food and poison.
pub const CAPTURE_RADIUS: f64 = 0.05;
/// Episode length limit in steps.
pub const STEP_LIMIT: u32 = 200;
/// Reward for reaching a food particle.
pub const FOOD_REWARD: f64 = 1.0;
/// Reward for touching a poison particle.
pub const POISON_REWARD: f64 = -1.0;
/// Per-step cost while searching.
pub const STEP_REWARD: f64 = -0.05;

/// Which particle classes exist.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScavengerTask {
    /// Food only; observation dimension `2m + 2`.
    FoodOnly,
    /// Food plus an equal number of poison particles.
    FoodAndPoison,
}

/// Scavenger episode state and dynamics.
#[derive(Debug, Clone)]
pub struct ScavengerEnv {
    task: ScavengerTask,
    object_count: usize,
    ego: [f64; 2],
    food: Vec<[f64; 2]>,
    poison: Vec<[f64; 2]>,
    steps: u32,
    done: bool,
}

impl ScavengerEnv {
    /// Creates an environment with `object_count` food particles (and as many
    /// poison particles for the two-class task) and starts the first episode.
    pub fn new(task: ScavengerTask, object_count: usize, seed: u64) -> Result<Self> {
        if object_count == 0 {
            return Err(EnvError::InvalidConfig("scavenger needs at least one food particle".into()));
        }
        let mut env = Self {
            task,
            object_count,
            ego: [0.0; 2],
            food: Vec::new(),
            poison: Vec::new(),
            steps: 0,
            done: false,
        };
        env.reset(seed);
        Ok(env)
    }

    pub fn task(&self) -> ScavengerTask {
        self.task
    }

    pub fn ego(&self) -> [f64; 2] {
        self.ego
    }

    pub fn food(&self) -> &[[f64; 2]] {
        &self.food
    }

    pub fn poison(&self) -> &[[f64; 2]] {
        &self.poison
    }

    pub fn steps(&self) -> u32 {
        self.steps
    }

    /// Offsets from the ego to each food particle, in index order.
    pub fn food_offsets(&self) -> Vec<[f64; 2]> {
        self.food.iter().map(|p| [p[0] - self.ego[0], p[1] - self.ego[1]]).collect()
    }

    /// Offsets from the ego to each poison particle, in index order.
    pub fn poison_offsets(&self) -> Vec<[f64; 2]> {
        self.poison.iter().map(|p| [p[0] - self.ego[0], p[1] - self.ego[1]]).collect()
    }

    /// Reorders the food list. Food particles are exchangeable, so dynamics
    /// and achievable return are unchanged; observations are permuted
    /// accordingly. `perm[i]` gives the old index of the new particle `i`.
    pub fn permute_food(&mut self, perm: &[usize]) {
        assert_eq!(perm.len(), self.food.len(), "permutation length must match food count");
        self.food = perm.iter().map(|&i| self.food[i]).collect();
    }

    /// Encoder observation: one class per particle kind holding relative
    /// offsets, ego position appended unpooled.
    pub fn to_object_set(&self) -> ObjectSet {
        let food = offsets_matrix(&self.food_offsets());
        let classes = match self.task {
            ScavengerTask::FoodOnly => vec![food],
            ScavengerTask::FoodAndPoison => vec![food, offsets_matrix(&self.poison_offsets())],
        };
        ObjectSet::new(classes, self.ego.to_vec())
    }

    /// Baseline observation: particle offsets in fixed index order, each class
    /// block sized for `max_objects`, then the ego position.
    pub fn to_flat_baseline(&self, max_objects: usize) -> Result<Vec<f64>> {
        if self.object_count > max_objects {
            return Err(EnvError::BaselineOverflow { count: self.object_count, max: max_objects });
        }
        let class_count = match self.task {
            ScavengerTask::FoodOnly => 1,
            ScavengerTask::FoodAndPoison => 2,
        };
        let mut out = Vec::with_capacity(2 * max_objects * class_count + 2);
        for offset in self.food_offsets() {
            out.extend(offset);
        }
        out.resize(2 * max_objects, 0.0);
        if self.task == ScavengerTask::FoodAndPoison {
            for offset in self.poison_offsets() {
                out.extend(offset);
            }
            out.resize(4 * max_objects, 0.0);
        }
        out.extend(self.ego);
        Ok(out)
    }
}

impl Environment for ScavengerEnv {
    fn reset(&mut self, seed: u64) {
        let mut rng = seeded_rng(seed);
        let sample = |rng: &mut rand_chacha::ChaCha8Rng| {
            [rng.gen_range(-WORLD_HALF..WORLD_HALF), rng.gen_range(-WORLD_HALF..WORLD_HALF)]
        };
        self.ego = [0.0, 0.0];
        self.food = (0..self.object_count).map(|_| sample(&mut rng)).collect();
        self.poison = match self.task {
            ScavengerTask::FoodOnly => Vec::new(),
            ScavengerTask::FoodAndPoison => (0..self.object_count).map(|_| sample(&mut rng)).collect(),
        };
        self.steps = 0;
        self.done = false;
    }

    fn step(&mut self, action: [f64; 2]) -> Result<StepResult> {
        if self.done {
            return Err(EnvError::EpisodeOver);
        }
        if !action[0].is_finite() || !action[1].is_finite() {
            return Err(EnvError::NonFiniteAction);
        }

        let v = clip_speed(action, MAX_STEP);
        self.ego[0] += v[0];
        self.ego[1] += v[1];
        self.steps += 1;

        let mut info = StepInfo::default();
        // Food contact takes precedence when a step lands in range of both a
        // food and a poison particle.
        let reward = if self.food.iter().any(|p| within(self.ego, *p, CAPTURE_RADIUS)) {
            info.terminal_cause = Some(TerminalCause::ReachedFood);
            FOOD_REWARD
        } else if self.poison.iter().any(|p| within(self.ego, *p, CAPTURE_RADIUS)) {
            info.terminal_cause = Some(TerminalCause::ReachedPoison);
            POISON_REWARD
        } else {
            if self.steps >= STEP_LIMIT {
                info.terminal_cause = Some(TerminalCause::Timeout);
            }
            STEP_REWARD
        };

        self.done = info.terminal_cause.is_some();
        Ok(StepResult { reward, done: self.done, info })
    }

    fn is_done(&self) -> bool {
        self.done
    }

    fn object_set(&self) -> ObjectSet {
        self.to_object_set()
    }

    fn flat_observation(&self) -> Vec<f64> {
        self.to_flat_baseline(self.object_count)
            .expect("own object count always fits")
    }

    fn flat_dim(&self) -> usize {
        match self.task {
            ScavengerTask::FoodOnly => 2 * self.object_count + 2,
            ScavengerTask::FoodAndPoison => 4 * self.object_count + 2,
        }
    }
}

/// Full-speed action toward the nearest food particle, slowing on the final
/// approach to land exactly on it. Ties go to the lowest particle index;
/// poison is simply never a target.
pub fn greedy_policy(env: &ScavengerEnv) -> [f64; 2] {
    let offsets = env.food_offsets();
    let Some(target) = offsets
        .iter()
        .min_by(|a, b| norm(**a).partial_cmp(&norm(**b)).expect("finite distances"))
    else {
        return [0.0, 0.0];
    };
    let d = norm(*target);
    if d <= MAX_STEP {
        // Close enough to land on the particle this step.
        *target
    } else {
        [target[0] / d * MAX_STEP, target[1] / d * MAX_STEP]
    }
}

fn offsets_matrix(offsets: &[[f64; 2]]) -> Mat {
    if offsets.is_empty() {
        return Mat::zeros(0, 2);
    }
    Mat::from_rows(offsets).expect("offset rows share dimension 2")
}

fn clip_speed(action: [f64; 2], max: f64) -> [f64; 2] {
    let n = norm(action);
    if n > max {
        [action[0] / n * max, action[1] / n * max]
    } else {
        action
    }
}

fn within(a: [f64; 2], b: [f64; 2], radius: f64) -> bool {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    dx * dx + dy * dy <= radius * radius
}

fn norm(v: [f64; 2]) -> f64 {
    (v[0] * v[0] + v[1] * v[1]).sqrt()
}
