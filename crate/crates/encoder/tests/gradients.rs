//! Encoder gradients against a central-difference oracle and closed forms.

use rand::Rng;
use setpool_encoder::{ClassSpec, EncoderParams, EncoderSpec, ObjectSet};
use setpool_nn::{seeded_rng, Mat, ParamStore};

const FD_STEP: f64 = 1e-5;
const TOLERANCE: f64 = 1e-4;

fn relative_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

fn dot_loss(params: &EncoderParams, store: &ParamStore, state: &ObjectSet, upstream: &[f64]) -> f64 {
    params
        .encode_state(store, state)
        .unwrap()
        .iter()
        .zip(upstream)
        .map(|(o, u)| o * u)
        .sum()
}

#[test]
fn encoder_gradients_match_central_differences() {
    for seed in 0..10u64 {
        let mut store = ParamStore::new();
        let mut class_a = ClassSpec::new(3, 3);
        class_a.filter_hidden = vec![4];
        class_a.abstraction_hidden = vec![4];
        let mut class_b = ClassSpec::new(2, 2);
        class_b.filter_hidden = vec![3];
        class_b.abstraction_hidden = vec![3];
        let spec = EncoderSpec::new(vec![class_a, class_b], 1).unwrap();
        let params = EncoderParams::init(&mut store, spec, seed).unwrap();
        assert!(store.scalar_count() <= 500);

        let mut rng = seeded_rng(5000 + seed);
        let mut objects_a = Mat::zeros(4, 3);
        let mut objects_b = Mat::zeros(2, 2);
        for m in [&mut objects_a, &mut objects_b] {
            for i in 0..m.rows() {
                for j in 0..m.cols() {
                    m.set(i, j, rng.gen_range(-2.0..2.0));
                }
            }
        }
        let state = ObjectSet::new(vec![objects_a, objects_b], vec![rng.gen_range(-1.0..1.0)]);
        let upstream: Vec<f64> =
            (0..params.output_dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();

        let analytic = params.encoder_gradients(&store, &state, &upstream).unwrap();

        let mut worst = 0.0f64;
        let ids: Vec<_> = store.ids().collect();
        for id in ids {
            let (rows, cols) = (store.get(id).rows(), store.get(id).cols());
            for r in 0..rows {
                for c in 0..cols {
                    let orig = store.get(id).get(r, c);
                    store.get_mut(id).set(r, c, orig + FD_STEP);
                    let plus = dot_loss(&params, &store, &state, &upstream);
                    store.get_mut(id).set(r, c, orig - FD_STEP);
                    let minus = dot_loss(&params, &store, &state, &upstream);
                    store.get_mut(id).set(r, c, orig);
                    let numeric = (plus - minus) / (2.0 * FD_STEP);
                    worst = worst.max(relative_error(analytic.get(id).get(r, c), numeric));
                }
            }
        }
        assert!(worst <= TOLERANCE, "seed {seed}: max relative error {worst}");
    }
}

#[test]
fn zero_upstream_gives_exactly_zero_gradients() {
    let mut store = ParamStore::new();
    let mut class = ClassSpec::new(2, 3);
    class.filter_hidden = vec![4];
    class.abstraction_hidden = vec![4];
    let spec = EncoderSpec::new(vec![class], 0).unwrap();
    let params = EncoderParams::init(&mut store, spec, 3).unwrap();
    let state = ObjectSet::single_class(Mat::from_rows(&[&[0.4, -0.6], &[1.0, 0.2]]).unwrap());

    let grads = params.encoder_gradients(&store, &state, &[0.0, 0.0, 0.0]).unwrap();
    for (_, grad) in grads.iter() {
        assert!(grad.data().iter().all(|&v| v == 0.0));
    }
}

#[test]
fn single_object_linear_abstraction_gradient_is_outer_product() {
    // One object means the attention weight is exactly 1, so the pooled
    // output is x*W + b. The gradient of <output, u> in W is then the outer
    // product x^T u, the bias gradient is u, and the filter nets cannot
    // influence anything.
    let mut store = ParamStore::new();
    let mut class = ClassSpec::new(3, 2);
    class.filter_hidden = vec![4];
    class.abstraction_hidden = vec![];
    let spec = EncoderSpec::new(vec![class], 0).unwrap();
    let params = EncoderParams::init(&mut store, spec, 21).unwrap();

    let x = [0.7, -1.1, 0.4];
    let u = [2.0, -0.5];
    let state = ObjectSet::single_class(Mat::from_rows(&[&x]).unwrap());
    let grads = params.encoder_gradients(&store, &state, &u).unwrap();

    let (w, b) = params.class_nets(0).abstraction.layer_params()[0];
    for (a, &xa) in x.iter().enumerate() {
        for (bi, &ub) in u.iter().enumerate() {
            assert!((grads.get(w).get(a, bi) - xa * ub).abs() < 1e-12);
        }
    }
    for (bi, &ub) in u.iter().enumerate() {
        assert!((grads.get(b).get(0, bi) - ub).abs() < 1e-12);
    }
    for (fw, fb) in params.class_nets(0).filter.layer_params() {
        assert!(grads.get(*fw).data().iter().all(|&v| v == 0.0));
        assert!(grads.get(*fb).data().iter().all(|&v| v == 0.0));
    }
}
