//! Closed-form checks on the clipped surrogate objective.

use setpool_nn::{Mat, ParamStore, Tape};
use setpool_ppo::{log_prob, normalize_advantages, ppo_loss_on_tape, GaussianPolicy, LossBatch};

fn setup(input_dim: usize, seed: u64) -> (ParamStore, GaussianPolicy) {
    let mut store = ParamStore::new();
    let policy = GaussianPolicy::init(&mut store, input_dim, 2, seed).unwrap();
    (store, policy)
}

/// Current log densities for each batch row, computed off-tape.
fn current_log_probs(
    store: &ParamStore,
    policy: &GaussianPolicy,
    states: &[Vec<f64>],
    actions: &[Vec<f64>],
) -> Vec<f64> {
    states
        .iter()
        .zip(actions)
        .map(|(s, a)| {
            let (mean, std) = policy.forward(store, s).unwrap();
            log_prob(&mean, &std, a)
        })
        .collect()
}

fn batch_mats(states: &[Vec<f64>], actions: &[Vec<f64>]) -> (Mat, Mat) {
    let reprs = Mat::from_rows(states).unwrap();
    let acts = Mat::from_rows(actions).unwrap();
    (reprs, acts)
}

#[test]
fn unit_ratio_makes_the_policy_term_minus_mean_advantage() {
    let (store, policy) = setup(3, 21);
    let states: Vec<Vec<f64>> = (0..6).map(|i| vec![0.1 * i as f64, -0.2, 0.3]).collect();
    let actions: Vec<Vec<f64>> = (0..6).map(|i| vec![0.05 * i as f64, -0.01]).collect();
    let old = current_log_probs(&store, &policy, &states, &actions);
    let advantages = [1.5, -0.25, 0.0, 2.0, -1.0, 0.75];
    let returns = vec![0.0; 6];
    let (reprs, acts) = batch_mats(&states, &actions);

    let mut tape = Tape::new();
    let repr_node = tape.constant(reprs);
    let nodes = ppo_loss_on_tape(
        &mut tape,
        &store,
        &policy,
        repr_node,
        &LossBatch { actions: &acts, old_log_probs: &old, advantages: &advantages, returns: &returns },
        0.1,
        0.5,
    )
    .unwrap();

    for i in 0..6 {
        assert!((tape.value(nodes.ratio).get(i, 0) - 1.0).abs() < 1e-12);
    }
    let mean_adv = advantages.iter().sum::<f64>() / 6.0;
    let policy_term = tape.value(nodes.policy_term).as_scalar().unwrap();
    assert!((policy_term - (-mean_adv)).abs() < 1e-12);
}

/// Single-step batches with hand-picked ratios exercise both clip corners:
/// ratio 1.2 with positive advantage contributes the clipped 1.1, and ratio
/// 0.5 with negative advantage contributes the clipped −0.9.
#[test]
fn clip_corners_take_the_pessimistic_branch() {
    let (store, policy) = setup(2, 33);
    for (ratio, advantage, expected_contribution) in
        [(1.2, 1.0, 1.1), (0.5, -1.0, -0.9), (1.05, 1.0, 1.05), (0.95, -2.0, -1.9)]
    {
        let states = vec![vec![0.4, -0.6]];
        let actions = vec![vec![0.2, 0.1]];
        let current = current_log_probs(&store, &policy, &states, &actions);
        // Choose the stored log-prob so exp(current - old) hits the target.
        let old = vec![current[0] - f64::ln(ratio)];
        let (reprs, acts) = batch_mats(&states, &actions);

        let mut tape = Tape::new();
        let repr_node = tape.constant(reprs);
        let nodes = ppo_loss_on_tape(
            &mut tape,
            &store,
            &policy,
            repr_node,
            &LossBatch {
                actions: &acts,
                old_log_probs: &old,
                advantages: &[advantage],
                returns: &[0.0],
            },
            0.1,
            0.0,
        )
        .unwrap();
        let policy_term = tape.value(nodes.policy_term).as_scalar().unwrap();
        assert!(
            (policy_term - (-expected_contribution)).abs() < 1e-9,
            "ratio {ratio}, advantage {advantage}: got {policy_term}"
        );
    }
}

#[test]
fn total_includes_scaled_value_error() {
    let (store, policy) = setup(2, 5);
    let states = vec![vec![0.3, 0.7], vec![-0.2, 0.1]];
    let actions = vec![vec![0.0, 0.0], vec![0.1, -0.1]];
    let old = current_log_probs(&store, &policy, &states, &actions);
    let returns = [3.0, -1.0];
    let (reprs, acts) = batch_mats(&states, &actions);

    let mut tape = Tape::new();
    let repr_node = tape.constant(reprs);
    let nodes = ppo_loss_on_tape(
        &mut tape,
        &store,
        &policy,
        repr_node,
        &LossBatch { actions: &acts, old_log_probs: &old, advantages: &[0.0, 0.0], returns: &returns },
        0.1,
        0.5,
    )
    .unwrap();

    let v0 = policy.value(&store, &states[0]).unwrap();
    let v1 = policy.value(&store, &states[1]).unwrap();
    let expected_value_term = ((v0 - 3.0).powi(2) + (v1 + 1.0).powi(2)) / 2.0;
    let value_term = tape.value(nodes.value_term).as_scalar().unwrap();
    assert!((value_term - expected_value_term).abs() < 1e-10);

    let total = tape.value(nodes.total).as_scalar().unwrap();
    let policy_term = tape.value(nodes.policy_term).as_scalar().unwrap();
    assert!((total - (policy_term + 0.5 * value_term)).abs() < 1e-12);
}

#[test]
fn exploding_ratio_is_reported_not_propagated_as_nan() {
    let (store, policy) = setup(2, 8);
    let states = vec![vec![0.0, 0.0]];
    let actions = vec![vec![0.0, 0.0]];
    // An absurd stored log-prob drives exp(logp - old) past f64 range.
    let old = vec![-1.0e9];
    let (reprs, acts) = batch_mats(&states, &actions);

    let mut tape = Tape::new();
    let repr_node = tape.constant(reprs);
    let err = ppo_loss_on_tape(
        &mut tape,
        &store,
        &policy,
        repr_node,
        &LossBatch { actions: &acts, old_log_probs: &old, advantages: &[1.0], returns: &[0.0] },
        0.1,
        0.5,
    )
    .unwrap_err();
    assert!(err.is_divergence(), "expected a divergence-class error, got {err}");
}

/// Normalizing advantages rescales and recenters the objective but must not
/// reverse its descent direction: gradients under raw and normalized
/// advantages keep a positive inner product.
#[test]
fn normalized_and_raw_advantages_agree_on_gradient_direction() {
    for seed in 0..10u64 {
        let (store, policy) = setup(3, 100 + seed);
        let mut rng_state = seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(1);
        let mut next = || {
            // Small xorshift keeps this oracle self-contained.
            rng_state ^= rng_state << 13;
            rng_state ^= rng_state >> 7;
            rng_state ^= rng_state << 17;
            (rng_state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        };
        let states: Vec<Vec<f64>> = (0..16).map(|_| (0..3).map(|_| next()).collect()).collect();
        let actions: Vec<Vec<f64>> = (0..16).map(|_| (0..2).map(|_| next()).collect()).collect();
        let old = current_log_probs(&store, &policy, &states, &actions);
        let raw: Vec<f64> = (0..16).map(|_| next() * 2.0).collect();
        let mut normalized = raw.clone();
        normalize_advantages(&mut normalized);
        let returns = vec![0.0; 16];

        let grad_for = |advantages: &[f64]| {
            let (reprs, acts) = batch_mats(&states, &actions);
            let mut tape = Tape::new();
            let repr_node = tape.constant(reprs);
            let nodes = ppo_loss_on_tape(
                &mut tape,
                &store,
                &policy,
                repr_node,
                &LossBatch { actions: &acts, old_log_probs: &old, advantages, returns: &returns },
                0.1,
                0.0,
            )
            .unwrap();
            tape.backward(nodes.policy_term, &store).unwrap()
        };

        let g_raw = grad_for(&raw);
        let g_norm = grad_for(&normalized);
        let mut dot = 0.0;
        for id in policy.param_ids() {
            let a = g_raw.get(id);
            let b = g_norm.get(id);
            for k in 0..a.len() {
                dot += a.data()[k] * b.data()[k];
            }
        }
        assert!(dot > 0.0, "seed {seed}: gradient directions disagree (dot = {dot})");
    }
}
