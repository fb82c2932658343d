//! Monte-Carlo estimate of the nearest-particle reference policy's return.

use setpool_envs::{greedy_policy, Environment, ScavengerEnv, ScavengerTask};
use setpool_nn::derive_indexed_seed;

use crate::config::TaskId;
use crate::error::{HarnessError, Result};

/// Mean and population standard deviation of episode returns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreedyEstimate {
    pub mean: f64,
    pub std: f64,
    pub episodes: usize,
}

/// Runs the greedy policy for `episodes` full episodes and aggregates the
/// undiscounted returns. Episode layouts are derived from `seed`, so the
/// estimate is deterministic and, for a fixed seed, identical across the
/// configurations that share it.
pub fn estimate_greedy_return(
    task: TaskId,
    object_count: usize,
    episodes: usize,
    seed: u64,
) -> Result<GreedyEstimate> {
    if episodes == 0 {
        return Err(HarnessError::InvalidArgument("episodes must be at least 1".into()));
    }
    let scavenger_task = match task {
        TaskId::Scavenger1 => ScavengerTask::FoodOnly,
        TaskId::Scavenger2 => ScavengerTask::FoodAndPoison,
        TaskId::Convoy => {
            return Err(HarnessError::InvalidArgument(
                "the greedy reference is defined only for the scavenger tasks".into(),
            ))
        }
    };
    let mut env = ScavengerEnv::new(scavenger_task, object_count, 0)?;
    let mut returns = Vec::with_capacity(episodes);
    for episode in 0..episodes {
        env.reset(derive_indexed_seed(seed, "greedy-episode", episode as u64));
        let mut total = 0.0;
        while !env.is_done() {
            let action = greedy_policy(&env);
            total += env.step(action)?.reward;
        }
        returns.push(total);
    }
    let n = returns.len() as f64;
    let mean = returns.iter().sum::<f64>() / n;
    let var = returns.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / n;
    Ok(GreedyEstimate { mean, std: var.sqrt(), episodes })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn estimates_are_seed_deterministic() {
        let a = estimate_greedy_return(TaskId::Scavenger1, 3, 50, 4).unwrap();
        let b = estimate_greedy_return(TaskId::Scavenger1, 3, 50, 4).unwrap();
        let c = estimate_greedy_return(TaskId::Scavenger1, 3, 50, 5).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn single_episode_reports_zero_spread() {
        let e = estimate_greedy_return(TaskId::Scavenger1, 2, 1, 0).unwrap();
        assert_eq!(e.std, 0.0);
        assert_eq!(e.episodes, 1);
    }

    #[test]
    fn nearby_food_yields_nearly_full_reward() {
        // Hunt for a seed whose first episode places food within a few steps
        // of the start; the greedy return must then be close to +1.
        let mut contrived = None;
        for seed in 0..5000u64 {
            let mut env = ScavengerEnv::new(ScavengerTask::FoodOnly, 1, 0).unwrap();
            env.reset(derive_indexed_seed(seed, "greedy-episode", 0));
            let [dx, dy] = env.food_offsets()[0];
            if (dx * dx + dy * dy).sqrt() < 0.15 {
                contrived = Some(seed);
                break;
            }
        }
        let seed = contrived.expect("some seed places food near the start");
        let e = estimate_greedy_return(TaskId::Scavenger1, 1, 1, seed).unwrap();
        assert!(e.mean >= 1.0 - 0.05 * 3.0, "greedy return {} too small", e.mean);
    }

    #[test]
    fn zero_episodes_and_convoy_are_rejected() {
        assert!(estimate_greedy_return(TaskId::Scavenger1, 2, 0, 0).is_err());
        assert!(estimate_greedy_return(TaskId::Convoy, 2, 10, 0).is_err());
    }

    #[test]
    fn poison_task_greedy_stays_positive() {
        // The reference policy ignores poison; captures still dominate.
        let e = estimate_greedy_return(TaskId::Scavenger2, 3, 200, 1).unwrap();
        assert!(e.mean > 0.0, "greedy mean {} should be positive", e.mean);
    }
}
