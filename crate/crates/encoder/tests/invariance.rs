//! Order-invariance and factorization properties of the set encoder.

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;
use setpool_encoder::{ClassSpec, EncoderParams, EncoderSpec, ObjectSet};
use setpool_nn::{seeded_rng, Mat, ParamStore};

fn permutation(len: usize, seed: u64) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..len).collect();
    perm.shuffle(&mut seeded_rng(seed));
    perm
}

fn small_class(n: usize, k: usize) -> ClassSpec {
    let mut class = ClassSpec::new(n, k);
    class.filter_hidden = vec![6];
    class.abstraction_hidden = vec![6];
    class
}

fn random_objects(rng: &mut impl rand::Rng, m: usize, n: usize) -> Mat {
    let mut mat = Mat::zeros(m, n);
    for i in 0..m {
        for j in 0..n {
            mat.set(i, j, rng.gen_range(-3.0..3.0));
        }
    }
    mat
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

proptest! {
    /// Reordering objects within any class moves the encoding by at most
    /// float-summation noise.
    #[test]
    fn within_class_permutation_leaves_encoding_fixed(
        param_seed in 0u64..500,
        data_seed in 0u64..10_000,
        m0 in 0usize..8,
        m1 in 0usize..8,
    ) {
        let mut store = ParamStore::new();
        let spec = EncoderSpec::new(vec![small_class(3, 4), small_class(2, 3)], 2).unwrap();
        let params = EncoderParams::init(&mut store, spec, param_seed).unwrap();

        let mut rng = seeded_rng(data_seed);
        let state = ObjectSet::new(
            vec![random_objects(&mut rng, m0, 3), random_objects(&mut rng, m1, 2)],
            vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)],
        );
        let base = params.encode_state(&store, &state).unwrap();

        let permuted = state
            .with_permuted_class(0, &permutation(m0, data_seed ^ 0xa5))
            .with_permuted_class(1, &permutation(m1, data_seed ^ 0x5a));
        let shuffled = params.encode_state(&store, &permuted).unwrap();

        prop_assert!(max_abs_diff(&base, &shuffled) <= 1e-9);
    }

    /// The factored accumulate-then-divide form equals direct attention
    /// pooling.
    #[test]
    fn factored_and_direct_encodings_agree(
        param_seed in 0u64..500,
        data_seed in 0u64..10_000,
        m in 1usize..11,
    ) {
        let mut store = ParamStore::new();
        let spec = EncoderSpec::new(vec![small_class(3, 5)], 0).unwrap();
        let params = EncoderParams::init(&mut store, spec, param_seed).unwrap();
        let mut rng = seeded_rng(data_seed);
        let objects = random_objects(&mut rng, m, 3);

        let direct = params.encode_class(&store, 0, &objects).unwrap();
        let factored = params.encode_phi_rho(&store, 0, &objects).unwrap();
        prop_assert!(max_abs_diff(&direct, &factored) <= 1e-9);
    }
}

#[test]
fn output_dimension_ignores_object_count() {
    let mut store = ParamStore::new();
    let spec = EncoderSpec::new(vec![small_class(3, 4), small_class(2, 3)], 2).unwrap();
    let expected = spec.output_dim();
    let params = EncoderParams::init(&mut store, spec, 11).unwrap();
    let mut rng = seeded_rng(42);
    for m0 in 1..=20 {
        for m1 in [0, 1, 7, 20] {
            let state = ObjectSet::new(
                vec![random_objects(&mut rng, m0, 3), random_objects(&mut rng, m1, 2)],
                vec![0.0, 0.0],
            );
            assert_eq!(params.encode_state(&store, &state).unwrap().len(), expected);
        }
    }
}

#[test]
fn swapping_objects_across_classes_changes_encoding() {
    // Same object vectors, but which class they belong to matters: classes
    // have independent networks, so moving an object between classes is not a
    // symmetry.
    let mut store = ParamStore::new();
    let spec = EncoderSpec::new(vec![small_class(2, 3), small_class(2, 3)], 0).unwrap();
    let params = EncoderParams::init(&mut store, spec, 13).unwrap();

    let a = [0.8, -0.3];
    let b = [-1.2, 0.5];
    let original = ObjectSet::new(
        vec![
            Mat::from_rows(&[&a]).unwrap(),
            Mat::from_rows(&[&b]).unwrap(),
        ],
        vec![],
    );
    let crossed = ObjectSet::new(
        vec![
            Mat::from_rows(&[&b]).unwrap(),
            Mat::from_rows(&[&a]).unwrap(),
        ],
        vec![],
    );
    let out_original = params.encode_state(&store, &original).unwrap();
    let out_crossed = params.encode_state(&store, &crossed).unwrap();
    assert!(max_abs_diff(&out_original, &out_crossed) > 1e-6);
}

#[test]
fn parameter_gradients_are_invariant_under_permutation() {
    for seed in 0..20u64 {
        let mut store = ParamStore::new();
        let spec = EncoderSpec::new(vec![small_class(3, 4), small_class(2, 2)], 1).unwrap();
        let params = EncoderParams::init(&mut store, spec, seed).unwrap();

        let mut rng = seeded_rng(9000 + seed);
        let m0 = rng.gen_range(2..7);
        let m1 = rng.gen_range(2..7);
        let state = ObjectSet::new(
            vec![random_objects(&mut rng, m0, 3), random_objects(&mut rng, m1, 2)],
            vec![rng.gen_range(-1.0..1.0)],
        );
        let upstream: Vec<f64> = (0..params.output_dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();

        let permuted = state
            .with_permuted_class(0, &permutation(m0, seed ^ 0x11))
            .with_permuted_class(1, &permutation(m1, seed ^ 0x22));

        let g_base = params.encoder_gradients(&store, &state, &upstream).unwrap();
        let g_perm = params.encoder_gradients(&store, &permuted, &upstream).unwrap();
        for (id, grad) in g_base.iter() {
            let diff = grad.max_abs_diff(g_perm.get(id)).unwrap();
            assert!(diff <= 1e-8, "seed {seed}: gradient moved by {diff}");
        }
    }
}
