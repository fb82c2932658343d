//! The clipped surrogate objective, recorded on a tape for differentiation.

use setpool_nn::{Mat, NodeId, ParamStore, Tape};

use crate::error::Result;
use crate::policy::{GaussianPolicy, LOG_STD_MAX, LOG_STD_MIN};

const HALF_LOG_TWO_PI: f64 = 0.918_938_533_204_672_7;

/// Handles into the recorded loss graph. Scalar values can be read back with
/// `tape.value(node).as_scalar()`.
#[derive(Debug, Clone, Copy)]
pub struct LossNodes {
    /// Policy term plus scaled value term: the quantity to differentiate.
    pub total: NodeId,
    /// −mean(min(ρ·A, clip(ρ)·A)).
    pub policy_term: NodeId,
    /// mean((V − returns)²), before the value coefficient.
    pub value_term: NodeId,
    /// ρ per step, batch × 1; exposed for diagnostics and tests.
    pub ratio: NodeId,
}

/// Minibatch slice in matrix form, advantages already normalized.
pub struct LossBatch<'a> {
    pub actions: &'a Mat,
    pub old_log_probs: &'a [f64],
    pub advantages: &'a [f64],
    pub returns: &'a [f64],
}

/// Records the clipped-surrogate policy loss and squared-error value loss on
/// `tape`, starting from a `batch × input_dim` representation node.
///
/// The probability ratio ρ = exp(logp − logp_old) overflowing to a non-finite
/// value surfaces as an error carrying the offending quantity's name.
pub fn ppo_loss_on_tape(
    tape: &mut Tape,
    store: &ParamStore,
    policy: &GaussianPolicy,
    repr_node: NodeId,
    batch: &LossBatch<'_>,
    clip_epsilon: f64,
    value_coef: f64,
) -> Result<LossNodes> {
    let rows = batch.actions.rows();
    let mean = policy.trunk().forward_on_tape(tape, store, repr_node)?;

    let log_std_raw = tape.param(store, policy.log_std_id());
    let log_std = tape.clip(log_std_raw, LOG_STD_MIN, LOG_STD_MAX);
    let log_std_b = tape.broadcast_rows(log_std, rows)?;
    let neg_log_std = tape.scale(log_std_b, -1.0);
    // 1/σ as exp(−log σ): keeps the graph division-free.
    let inv_std = tape.exp(neg_log_std)?;

    let actions = tape.constant(batch.actions.clone());
    let centered = tape.sub(actions, mean)?;
    let z = tape.mul(centered, inv_std)?;
    let z_sq = tape.mul(z, z)?;
    let minus_half_z_sq = tape.scale(z_sq, -0.5);
    let per_dim = tape.add(neg_log_std, minus_half_z_sq)?;
    let per_dim = tape.add_scalar(per_dim, -HALF_LOG_TWO_PI);
    let log_probs = tape.row_sums(per_dim);

    let old = tape.constant(Mat::from_vec(rows, 1, batch.old_log_probs.to_vec())?);
    let log_ratio = tape.sub(log_probs, old)?;
    let ratio = tape.exp(log_ratio)?;

    let adv = tape.constant(Mat::from_vec(rows, 1, batch.advantages.to_vec())?);
    let surrogate = tape.mul(ratio, adv)?;
    let clipped_ratio = tape.clip(ratio, 1.0 - clip_epsilon, 1.0 + clip_epsilon);
    let clipped_surrogate = tape.mul(clipped_ratio, adv)?;
    let pessimistic = tape.min_elem(surrogate, clipped_surrogate)?;
    let mean_surrogate = tape.mean_all(pessimistic);
    let policy_term = tape.scale(mean_surrogate, -1.0);

    let values = policy.critic().forward_on_tape(tape, store, repr_node)?;
    let targets = tape.constant(Mat::from_vec(rows, 1, batch.returns.to_vec())?);
    let value_error = tape.sub(values, targets)?;
    let value_sq = tape.mul(value_error, value_error)?;
    let value_term = tape.mean_all(value_sq);

    let scaled_value = tape.scale(value_term, value_coef);
    let total = tape.add(policy_term, scaled_value)?;

    Ok(LossNodes { total, policy_term, value_term, ratio })
}

/// Normalizes to zero mean and unit variance in place; a tiny floor on the
/// standard deviation guards constant batches.
pub fn normalize_advantages(advantages: &mut [f64]) {
    if advantages.is_empty() {
        return;
    }
    let n = advantages.len() as f64;
    let mean = advantages.iter().sum::<f64>() / n;
    let var = advantages.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>() / n;
    let denom = var.sqrt() + 1e-8;
    for a in advantages.iter_mut() {
        *a = (*a - mean) / denom;
    }
}
