//! Diagonal-Gaussian actor and a separate critic of the same trunk shape.
//!
//! Both networks are four hidden layers of 64 leaky-ReLU units. The actor's
//! final linear layer emits the action mean; per-dimension log standard
//! deviations are free parameters shared across states, clamped to a range
//! that prevents both premature collapse and runaway exploration.

use rand::Rng;
use setpool_nn::{
    derive_seed, standard_normal, Activation, Mat, Mlp, MlpSpec, ParamId, ParamStore,
    DEFAULT_LEAK_SLOPE,
};

use crate::error::{PpoError, Result};

/// Hidden width of actor and critic trunks.
pub const HIDDEN_WIDTH: usize = 64;
/// Hidden depth of actor and critic trunks.
pub const HIDDEN_LAYERS: usize = 4;
/// Lower clamp for the log standard deviation.
pub const LOG_STD_MIN: f64 = -5.0;
/// Upper clamp for the log standard deviation.
pub const LOG_STD_MAX: f64 = 2.0;
/// Initial log standard deviation (std ≈ 0.61).
pub const LOG_STD_INIT: f64 = -0.5;

const HALF_LOG_TWO_PI: f64 = 0.918_938_533_204_672_7;

/// Stochastic policy with state-independent exploration noise.
#[derive(Debug, Clone)]
pub struct GaussianPolicy {
    trunk: Mlp,
    critic: Mlp,
    log_std: ParamId,
    input_dim: usize,
    action_dim: usize,
}

fn trunk_widths(input_dim: usize, output_dim: usize) -> Vec<usize> {
    let mut widths = Vec::with_capacity(HIDDEN_LAYERS + 2);
    widths.push(input_dim);
    widths.extend(std::iter::repeat(HIDDEN_WIDTH).take(HIDDEN_LAYERS));
    widths.push(output_dim);
    widths
}

impl GaussianPolicy {
    /// Registers actor, critic, and log-std parameters in `store`. Actor and
    /// critic weights come from independent streams derived from `seed`.
    pub fn init(
        store: &mut ParamStore,
        input_dim: usize,
        action_dim: usize,
        seed: u64,
    ) -> Result<Self> {
        if input_dim == 0 || action_dim == 0 {
            return Err(PpoError::Config(
                "policy input and action dimensions must be positive".into(),
            ));
        }
        let trunk = Mlp::init(
            store,
            MlpSpec::new(trunk_widths(input_dim, action_dim), Activation::LeakyRelu, DEFAULT_LEAK_SLOPE)?,
            derive_seed(seed, "actor"),
        )?;
        let critic = Mlp::init(
            store,
            MlpSpec::new(trunk_widths(input_dim, 1), Activation::LeakyRelu, DEFAULT_LEAK_SLOPE)?,
            derive_seed(seed, "critic"),
        )?;
        let log_std = store.register(Mat::filled(1, action_dim, LOG_STD_INIT));
        Ok(Self { trunk, critic, log_std, input_dim, action_dim })
    }

    /// Rebuilds a policy around networks loaded from a checkpoint.
    pub fn from_parts(
        trunk: Mlp,
        critic: Mlp,
        log_std: ParamId,
        store: &ParamStore,
    ) -> Result<Self> {
        let input_dim = trunk.spec().input_dim();
        let action_dim = trunk.spec().output_dim();
        if critic.spec().input_dim() != input_dim || critic.spec().output_dim() != 1 {
            return Err(PpoError::Config(format!(
                "critic maps {} -> {}, expected {} -> 1",
                critic.spec().input_dim(),
                critic.spec().output_dim(),
                input_dim
            )));
        }
        let ls = store.get(log_std);
        if ls.rows() != 1 || ls.cols() != action_dim {
            return Err(PpoError::Config(format!(
                "log-std has shape {}x{}, expected 1x{}",
                ls.rows(),
                ls.cols(),
                action_dim
            )));
        }
        Ok(Self { trunk, critic, log_std, input_dim, action_dim })
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn action_dim(&self) -> usize {
        self.action_dim
    }

    pub fn trunk(&self) -> &Mlp {
        &self.trunk
    }

    pub fn critic(&self) -> &Mlp {
        &self.critic
    }

    pub fn log_std_id(&self) -> ParamId {
        self.log_std
    }

    /// Actor parameters followed by critic parameters and the log-std.
    pub fn param_ids(&self) -> Vec<ParamId> {
        let mut ids = self.trunk.param_ids();
        ids.extend(self.critic.param_ids());
        ids.push(self.log_std);
        ids
    }

    /// Clamped log standard deviations as currently stored.
    pub fn clamped_log_std(&self, store: &ParamStore) -> Vec<f64> {
        store
            .get(self.log_std)
            .data()
            .iter()
            .map(|v| v.clamp(LOG_STD_MIN, LOG_STD_MAX))
            .collect()
    }

    /// Distribution parameters at one state: `(mean, std)`.
    pub fn forward(&self, store: &ParamStore, representation: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        if representation.len() != self.input_dim {
            return Err(PpoError::Config(format!(
                "representation has {} values, policy expects {}",
                representation.len(),
                self.input_dim
            )));
        }
        if representation.iter().any(|v| !v.is_finite()) {
            return Err(PpoError::NonFinite { context: "policy input representation" });
        }
        let x = Mat::from_vec(1, self.input_dim, representation.to_vec())?;
        let mean = self.trunk.forward(store, &x)?;
        if !mean.is_finite() {
            return Err(PpoError::NonFinite { context: "policy mean output" });
        }
        let std = self.clamped_log_std(store).iter().map(|ls| ls.exp()).collect();
        Ok((mean.data().to_vec(), std))
    }

    /// Critic estimate at one state.
    pub fn value(&self, store: &ParamStore, representation: &[f64]) -> Result<f64> {
        if representation.len() != self.input_dim {
            return Err(PpoError::Config(format!(
                "representation has {} values, critic expects {}",
                representation.len(),
                self.input_dim
            )));
        }
        let x = Mat::from_vec(1, self.input_dim, representation.to_vec())?;
        let v = self.critic.forward(store, &x)?;
        Ok(v.as_scalar()?)
    }

    /// Draws an action and returns it with its log density.
    pub fn sample_action<R: Rng>(
        mean: &[f64],
        std: &[f64],
        rng: &mut R,
    ) -> (Vec<f64>, f64) {
        let action: Vec<f64> = mean
            .iter()
            .zip(std)
            .map(|(m, s)| m + s * standard_normal(rng))
            .collect();
        let logp = log_prob(mean, std, &action);
        (action, logp)
    }
}

/// Log density of a diagonal Gaussian at `action`.
pub fn log_prob(mean: &[f64], std: &[f64], action: &[f64]) -> f64 {
    debug_assert_eq!(mean.len(), std.len());
    debug_assert_eq!(mean.len(), action.len());
    mean.iter()
        .zip(std)
        .zip(action)
        .map(|((m, s), a)| {
            let z = (a - m) / s;
            -s.ln() - HALF_LOG_TWO_PI - 0.5 * z * z
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use setpool_nn::seeded_rng;

    fn tiny_policy() -> (ParamStore, GaussianPolicy) {
        let mut store = ParamStore::new();
        let policy = GaussianPolicy::init(&mut store, 3, 2, 77).unwrap();
        (store, policy)
    }

    #[test]
    fn standard_normal_density_at_origin() {
        // 1-D, mean 0, std 1, action 0: -0.5*ln(2*pi).
        let lp = log_prob(&[0.0], &[1.0], &[0.0]);
        assert!((lp - (-0.918_938_5)).abs() < 1e-7);
    }

    #[test]
    fn density_at_the_mean_depends_only_on_scale() {
        let mean = [0.3, -1.2, 4.0];
        let std = [0.5, 2.0, 1.0];
        let lp = log_prob(&mean, &std, &mean);
        let expected: f64 =
            -std.iter().map(|s: &f64| s.ln()).sum::<f64>() - 1.5 * (2.0 * std::f64::consts::PI).ln();
        assert!((lp - expected).abs() < 1e-12);
    }

    #[test]
    fn sampling_is_seed_deterministic() {
        let mean = [0.1, -0.2];
        let std = [0.6, 0.6];
        let draw = |seed| {
            let mut rng = seeded_rng(seed);
            GaussianPolicy::sample_action(&mean, &std, &mut rng)
        };
        assert_eq!(draw(5), draw(5));
        assert_ne!(draw(5).0, draw(6).0);
    }

    #[test]
    fn forward_returns_clamped_std() {
        let (mut store, policy) = tiny_policy();
        // Push the raw parameter way out of range; forward must clamp.
        store.set(policy.log_std_id(), Mat::from_vec(1, 2, vec![9.0, -9.0]).unwrap()).unwrap();
        let (_, std) = policy.forward(&store, &[0.1, 0.2, 0.3]).unwrap();
        assert!((std[0] - LOG_STD_MAX.exp()).abs() < 1e-12);
        assert!((std[1] - LOG_STD_MIN.exp()).abs() < 1e-12);
    }

    #[test]
    fn initial_std_matches_configured_log_std() {
        let (store, policy) = tiny_policy();
        let (_, std) = policy.forward(&store, &[0.0, 0.0, 0.0]).unwrap();
        for s in std {
            assert!((s - LOG_STD_INIT.exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn mean_is_finite_for_finite_inputs() {
        let (store, policy) = tiny_policy();
        let mut rng = seeded_rng(1);
        for _ in 0..50 {
            let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-100.0..100.0)).collect();
            let (mean, _) = policy.forward(&store, &x).unwrap();
            assert!(mean.iter().all(|v| v.is_finite()));
        }
    }

    #[test]
    fn non_finite_representation_is_rejected() {
        let (store, policy) = tiny_policy();
        let err = policy.forward(&store, &[0.0, f64::NAN, 0.0]).unwrap_err();
        assert!(matches!(err, PpoError::NonFinite { .. }));
        assert!(err.is_divergence());
    }

    #[test]
    fn actor_and_critic_have_documented_shapes() {
        let (store, policy) = tiny_policy();
        assert_eq!(policy.trunk().spec().widths, [3, 64, 64, 64, 64, 2]);
        assert_eq!(policy.critic().spec().widths, [3, 64, 64, 64, 64, 1]);
        assert_eq!(store.get(policy.log_std_id()).cols(), 2);
        let v = policy.value(&store, &[0.5, -0.5, 0.0]).unwrap();
        assert!(v.is_finite());
    }
}
