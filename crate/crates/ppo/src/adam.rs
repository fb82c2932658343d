//! Adaptive-moment gradient descent over a parameter store.

use setpool_nn::{Gradients, Mat, ParamStore};

use crate::error::{PpoError, Result};

/// Per-parameter first/second moment state plus hyperparameters.
#[derive(Debug, Clone)]
pub struct Adam {
    learning_rate: f64,
    beta1: f64,
    beta2: f64,
    epsilon: f64,
    first: Vec<Mat>,
    second: Vec<Mat>,
    step_count: u64,
}

impl Adam {
    /// Moment buffers are laid out to match `store`; registering more
    /// parameters after construction is not supported.
    pub fn new(store: &ParamStore, learning_rate: f64) -> Self {
        let shapes: Vec<(usize, usize)> =
            store.ids().map(|id| (store.get(id).rows(), store.get(id).cols())).collect();
        Self {
            learning_rate,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            first: shapes.iter().map(|&(r, c)| Mat::zeros(r, c)).collect(),
            second: shapes.iter().map(|&(r, c)| Mat::zeros(r, c)).collect(),
            step_count: 0,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step_count
    }

    /// One update over every registered parameter. Parameters without an
    /// entry in `gradients` see a zero gradient (their moments decay).
    pub fn step(&mut self, store: &mut ParamStore, gradients: &Gradients) -> Result<()> {
        if store.len() != self.first.len() {
            return Err(PpoError::Config(format!(
                "optimizer tracks {} parameters, store now has {}",
                self.first.len(),
                store.len()
            )));
        }
        self.step_count += 1;
        let bias1 = 1.0 - self.beta1.powi(self.step_count as i32);
        let bias2 = 1.0 - self.beta2.powi(self.step_count as i32);
        let ids: Vec<_> = store.ids().collect();
        for id in ids {
            let idx = id.index();
            let grad = gradients.get(id);
            let param = store.get_mut(id);
            let m = &mut self.first[idx];
            let v = &mut self.second[idx];
            for k in 0..param.len() {
                let g = grad.data()[k];
                let mk = self.beta1 * m.data()[k] + (1.0 - self.beta1) * g;
                let vk = self.beta2 * v.data()[k] + (1.0 - self.beta2) * g * g;
                m.data_mut()[k] = mk;
                v.data_mut()[k] = vk;
                let update =
                    self.learning_rate * (mk / bias1) / ((vk / bias2).sqrt() + self.epsilon);
                param.data_mut()[k] -= update;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use setpool_nn::Tape;

    #[test]
    fn quadratic_bowl_converges_to_its_minimum() {
        let mut store = ParamStore::new();
        let x = store.register(Mat::from_vec(1, 1, vec![-4.0]).unwrap());
        let mut adam = Adam::new(&store, 0.05);
        for _ in 0..2000 {
            // d/dx (x-3)^2 = 2(x-3)
            let g = 2.0 * (store.get(x).get(0, 0) - 3.0);
            let mut tape = Tape::new();
            let xn = tape.param(&store, x);
            let shifted = tape.add_scalar(xn, -3.0);
            let sq = tape.mul(shifted, shifted).unwrap();
            let loss = tape.mean_all(sq);
            let grads = tape.backward(loss, &store).unwrap();
            assert!((grads.get(x).get(0, 0) - g).abs() < 1e-12);
            adam.step(&mut store, &grads).unwrap();
        }
        assert!((store.get(x).get(0, 0) - 3.0).abs() < 1e-3);
    }

    #[test]
    fn first_step_magnitude_is_scale_invariant() {
        // Adam's bias-corrected first step moves by ~learning_rate regardless
        // of the raw gradient scale.
        for grad_scale in [1e-3, 1.0, 1e3] {
            let mut store = ParamStore::new();
            let x = store.register(Mat::from_vec(1, 1, vec![0.0]).unwrap());
            let mut adam = Adam::new(&store, 0.01);
            let mut tape = Tape::new();
            let xn = tape.param(&store, x);
            let scaled = tape.scale(xn, grad_scale);
            let loss = tape.mean_all(scaled);
            let grads = tape.backward(loss, &store).unwrap();
            adam.step(&mut store, &grads).unwrap();
            let moved = store.get(x).get(0, 0).abs();
            assert!(
                (moved - 0.01).abs() < 1e-6,
                "scale {grad_scale}: first step moved {moved}"
            );
        }
    }

    #[test]
    fn unused_parameters_only_decay_moments() {
        let mut store = ParamStore::new();
        let used = store.register(Mat::from_vec(1, 1, vec![1.0]).unwrap());
        let idle = store.register(Mat::from_vec(1, 1, vec![5.0]).unwrap());
        let mut adam = Adam::new(&store, 0.01);
        let mut tape = Tape::new();
        let xn = tape.param(&store, used);
        let loss = tape.mean_all(xn);
        let grads = tape.backward(loss, &store).unwrap();
        adam.step(&mut store, &grads).unwrap();
        assert_eq!(store.get(idle).get(0, 0), 5.0);
        assert!(store.get(used).get(0, 0) < 1.0);
    }
}
