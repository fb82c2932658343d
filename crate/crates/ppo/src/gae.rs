//! Generalized advantage estimation over rollout sequences.
//!
//! The estimator runs the standard backward recursion over temporal-difference
//! residuals. A `done` flag cuts both the value bootstrap and the advantage
//! carry-over, so one call handles a batch containing several episode
//! fragments back to back.

use crate::error::{PpoError, Result};

/// Computes advantages and returns for one rollout.
///
/// `values[t]` is the critic's estimate for the state *before* step `t`;
/// `bootstrap` is the estimate for the state after the final step and is used
/// only when the final step did not terminate. Returned vectors satisfy
/// `returns[t] = advantages[t] + values[t]`.
pub fn compute_gae(
    rewards: &[f64],
    values: &[f64],
    dones: &[bool],
    bootstrap: f64,
    gamma: f64,
    lambda: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if rewards.len() != values.len() || rewards.len() != dones.len() {
        return Err(PpoError::LengthMismatch {
            detail: format!(
                "{} rewards, {} values, {} done flags",
                rewards.len(),
                values.len(),
                dones.len()
            ),
        });
    }
    let n = rewards.len();
    let mut advantages = vec![0.0; n];
    let mut carry = 0.0;
    for t in (0..n).rev() {
        let next_value = if t + 1 < n { values[t + 1] } else { bootstrap };
        let continues = if dones[t] { 0.0 } else { 1.0 };
        let delta = rewards[t] + gamma * next_value * continues - values[t];
        carry = delta + gamma * lambda * continues * carry;
        advantages[t] = carry;
    }
    let returns = advantages.iter().zip(values).map(|(a, v)| a + v).collect();
    Ok((advantages, returns))
}
