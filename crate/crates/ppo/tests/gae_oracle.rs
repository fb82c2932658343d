//! The advantage recursion checked against its closed-form definition.
//!
//! The recursive estimator must equal the direct geometric sum
//! A_t = Σ_{l≥0} (γλ)^l δ_{t+l}, where the sum stops at the first episode
//! boundary at or after t. The direct form below is computed independently,
//! term by term, with no shared code.

use proptest::prelude::*;
use setpool_ppo::compute_gae;

fn direct_definition(
    rewards: &[f64],
    values: &[f64],
    dones: &[bool],
    bootstrap: f64,
    gamma: f64,
    lambda: f64,
) -> Vec<f64> {
    let n = rewards.len();
    let delta: Vec<f64> = (0..n)
        .map(|t| {
            let next = if t + 1 < n { values[t + 1] } else { bootstrap };
            let cont = if dones[t] { 0.0 } else { 1.0 };
            rewards[t] + gamma * next * cont - values[t]
        })
        .collect();
    (0..n)
        .map(|t| {
            let mut acc = 0.0;
            let mut weight = 1.0;
            for u in t..n {
                acc += weight * delta[u];
                if dones[u] {
                    break;
                }
                weight *= gamma * lambda;
            }
            acc
        })
        .collect()
}

fn sequence_strategy() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<bool>, f64)> {
    (1usize..=100).prop_flat_map(|len| {
        (
            prop::collection::vec(-5.0..5.0f64, len),
            prop::collection::vec(-5.0..5.0f64, len),
            prop::collection::vec(prop::bool::weighted(0.15), len),
            -5.0..5.0f64,
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn recursion_matches_direct_sum(
        (rewards, values, dones, bootstrap) in sequence_strategy(),
        gamma in 0.01..=1.0f64,
        lambda in 0.0..=1.0f64,
    ) {
        let (adv, ret) =
            compute_gae(&rewards, &values, &dones, bootstrap, gamma, lambda).unwrap();
        let oracle = direct_definition(&rewards, &values, &dones, bootstrap, gamma, lambda);
        for t in 0..rewards.len() {
            prop_assert!((adv[t] - oracle[t]).abs() <= 1e-10,
                "t={}: recursion {} vs direct {}", t, adv[t], oracle[t]);
            prop_assert!((ret[t] - (adv[t] + values[t])).abs() <= 1e-12);
        }
    }

    #[test]
    fn lambda_edge_cases_match_direct_sum(
        (rewards, values, dones, bootstrap) in sequence_strategy(),
        gamma in 0.01..=1.0f64,
        lambda_one in prop::bool::ANY,
    ) {
        let lambda = if lambda_one { 1.0 } else { 0.0 };
        let (adv, _) = compute_gae(&rewards, &values, &dones, bootstrap, gamma, lambda).unwrap();
        let oracle = direct_definition(&rewards, &values, &dones, bootstrap, gamma, lambda);
        for t in 0..rewards.len() {
            prop_assert!((adv[t] - oracle[t]).abs() <= 1e-10);
        }
    }
}
