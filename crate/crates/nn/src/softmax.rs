//! Numerically stable softmax over a column of scores.

use crate::error::{NnError, Result};

/// Softmax of a score vector, computed with max-subtraction.
///
/// Subtracting the maximum keeps `exp` in range without changing the result:
/// the max is itself invariant under reordering the inputs, so stability does
/// not cost invariance. Outputs are positive and sum to 1.
pub fn softmax_column(scores: &[f64]) -> Result<Vec<f64>> {
    if scores.is_empty() {
        return Err(NnError::EmptyInput("softmax_column"));
    }
    debug_assert!(scores.iter().all(|v| v.is_finite()), "softmax over non-finite scores");
    let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut out: Vec<f64> = scores.iter().map(|&v| (v - max).exp()).collect();
    let sum: f64 = out.iter().sum();
    for v in &mut out {
        *v /= sum;
    }
    Ok(out)
}
