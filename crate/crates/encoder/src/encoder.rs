//! Attention pooling of object sets into fixed-size vectors.
//!
//! Per class, a filter net scores each object, a softmax over the scores
//! yields attention weights, and the weighted abstraction-net outputs are
//! summed over objects. The sum makes the result independent of object order
//! and of object count; class outputs are concatenated and the ego block is
//! appended untouched.

use setpool_nn::{
    derive_indexed_seed, softmax_column, Activation, Checkpoint, Gradients, Mat, Mlp, MlpSpec,
    NodeId, ParamId, ParamStore, Section, Tape, DEFAULT_LEAK_SLOPE,
};

use crate::error::{EncoderError, Result};
use crate::object_set::ObjectSet;
use crate::spec::EncoderSpec;

/// The two networks serving one object class.
#[derive(Debug, Clone)]
pub struct ClassNets {
    /// Scores each object with one scalar.
    pub filter: Mlp,
    /// Projects each object into the pooled space.
    pub abstraction: Mlp,
}

/// Trainable encoder parameters, one [`ClassNets`] per object class.
#[derive(Debug, Clone)]
pub struct EncoderParams {
    spec: EncoderSpec,
    classes: Vec<ClassNets>,
}

impl EncoderParams {
    /// Initializes all per-class networks from a base seed. Each network gets
    /// its own derived stream, so class order and count never alias draws.
    pub fn init(store: &mut ParamStore, spec: EncoderSpec, seed: u64) -> Result<Self> {
        spec.validate()?;
        let mut classes = Vec::with_capacity(spec.class_count());
        for (j, class) in spec.classes.iter().enumerate() {
            let mut filter_widths = vec![class.input_dim];
            filter_widths.extend(&class.filter_hidden);
            filter_widths.push(1);
            let filter = Mlp::init(
                store,
                MlpSpec::new(filter_widths, Activation::Relu, DEFAULT_LEAK_SLOPE)?,
                derive_indexed_seed(seed, "encoder-filter", j as u64),
            )?;

            let mut abstraction_widths = vec![class.input_dim];
            abstraction_widths.extend(&class.abstraction_hidden);
            abstraction_widths.push(class.abstract_dim);
            let abstraction = Mlp::init(
                store,
                MlpSpec::new(abstraction_widths, Activation::Relu, DEFAULT_LEAK_SLOPE)?,
                derive_indexed_seed(seed, "encoder-abstraction", j as u64),
            )?;

            classes.push(ClassNets { filter, abstraction });
        }
        Ok(Self { spec, classes })
    }

    pub fn spec(&self) -> &EncoderSpec {
        &self.spec
    }

    pub fn class_nets(&self, j: usize) -> &ClassNets {
        &self.classes[j]
    }

    /// Every trainable handle, in class order (filter before abstraction).
    pub fn param_ids(&self) -> Vec<ParamId> {
        self.classes
            .iter()
            .flat_map(|c| c.filter.param_ids().into_iter().chain(c.abstraction.param_ids()))
            .collect()
    }

    /// Length of encoded outputs, fixed by the spec alone.
    pub fn output_dim(&self) -> usize {
        self.spec.output_dim()
    }

    fn check_class_objects(&self, j: usize, objects: &Mat) -> Result<()> {
        let expected = self.spec.classes[j].input_dim;
        if objects.cols() != expected {
            return Err(EncoderError::ObjectDimMismatch { class: j, expected, got: objects.cols() });
        }
        Ok(())
    }

    /// Softmax attention weights for one class's objects.
    pub fn attention_weights(&self, store: &ParamStore, j: usize, objects: &Mat) -> Result<Vec<f64>> {
        self.check_class_objects(j, objects)?;
        if objects.rows() == 0 {
            return Err(EncoderError::EmptyClass("attention_weights"));
        }
        let scores = self.classes[j].filter.forward(store, objects)?;
        Ok(softmax_column(scores.data())?)
    }

    /// Pooled output for one class: attention-weighted sum of abstraction-net
    /// rows. An empty class pools to the zero vector — the neutral element of
    /// the sum, standing in for "no evidence".
    pub fn encode_class(&self, store: &ParamStore, j: usize, objects: &Mat) -> Result<Vec<f64>> {
        self.check_class_objects(j, objects)?;
        let k = self.spec.classes[j].abstract_dim;
        if objects.rows() == 0 {
            return Ok(vec![0.0; k]);
        }
        let weights = self.attention_weights(store, j, objects)?;
        let projected = self.classes[j].abstraction.forward(store, objects)?;
        let mut out = vec![0.0; k];
        for (i, &w) in weights.iter().enumerate() {
            for (l, o) in out.iter_mut().enumerate() {
                *o += w * projected.get(i, l);
            }
        }
        Ok(out)
    }

    /// Same pooling computed in sum-decomposed form: accumulate per-object
    /// `phi(s) = (abstraction(s) * exp(score - c), exp(score - c))` and divide
    /// at the end, with `c` the max score for stability. Must agree with
    /// [`Self::encode_class`] to within summation-reordering error.
    pub fn encode_phi_rho(&self, store: &ParamStore, j: usize, objects: &Mat) -> Result<Vec<f64>> {
        self.check_class_objects(j, objects)?;
        if objects.rows() == 0 {
            return Err(EncoderError::EmptyClass("encode_phi_rho"));
        }
        let nets = &self.classes[j];
        let k = self.spec.classes[j].abstract_dim;

        // Per-object scores; the max is itself order-invariant.
        let mut scores = Vec::with_capacity(objects.rows());
        for i in 0..objects.rows() {
            let row = Mat::row_vector(objects.row(i));
            scores.push(nets.filter.forward(store, &row)?.as_scalar()?);
        }
        let c = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);

        let mut numerator = vec![0.0; k];
        let mut denominator = 0.0;
        for (i, &score) in scores.iter().enumerate() {
            let row = Mat::row_vector(objects.row(i));
            let projected = nets.abstraction.forward(store, &row)?;
            let e = (score - c).exp();
            denominator += e;
            for (l, n) in numerator.iter_mut().enumerate() {
                *n += projected.get(0, l) * e;
            }
        }
        Ok(numerator.into_iter().map(|n| n / denominator).collect())
    }

    fn check_state(&self, state: &ObjectSet) -> Result<()> {
        if state.class_count() != self.spec.class_count() {
            return Err(EncoderError::ClassCountMismatch {
                expected: self.spec.class_count(),
                got: state.class_count(),
            });
        }
        for j in 0..state.class_count() {
            self.check_class_objects(j, state.class(j))?;
        }
        if state.ego().len() != self.spec.ego_dim {
            return Err(EncoderError::EgoDimMismatch {
                expected: self.spec.ego_dim,
                got: state.ego().len(),
            });
        }
        Ok(())
    }

    /// Full encoded state: per-class pooled vectors in class order, then the
    /// ego block. Output length is [`Self::output_dim`] for any object counts.
    pub fn encode_state(&self, store: &ParamStore, state: &ObjectSet) -> Result<Vec<f64>> {
        self.check_state(state)?;
        let mut out = Vec::with_capacity(self.output_dim());
        for j in 0..state.class_count() {
            out.extend(self.encode_class(store, j, state.class(j))?);
        }
        out.extend_from_slice(state.ego());
        Ok(out)
    }

    /// Tape-recorded encoding, as a `1 x output_dim` node, for training
    /// through the encoder.
    pub fn encode_state_on_tape(
        &self,
        tape: &mut Tape,
        store: &ParamStore,
        state: &ObjectSet,
    ) -> Result<NodeId> {
        self.check_state(state)?;
        let mut parts = Vec::with_capacity(state.class_count() + 1);
        for (j, nets) in self.classes.iter().enumerate() {
            let objects = state.class(j);
            if objects.rows() == 0 {
                parts.push(tape.constant(Mat::zeros(1, self.spec.classes[j].abstract_dim)));
                continue;
            }
            let on = tape.constant(objects.clone());
            let scores = nets.filter.forward_on_tape(tape, store, on)?;
            let weights = tape.softmax_col(scores)?;
            let projected = nets.abstraction.forward_on_tape(tape, store, on)?;
            let weighted = tape.scale_rows(projected, weights)?;
            parts.push(tape.col_sums(weighted));
        }
        if self.spec.ego_dim > 0 {
            parts.push(tape.constant(Mat::row_vector(state.ego())));
        }
        Ok(tape.concat_cols(&parts)?)
    }

    /// Gradients of `<encode_state(state), upstream>` with respect to every
    /// parameter in the store.
    pub fn encoder_gradients(
        &self,
        store: &ParamStore,
        state: &ObjectSet,
        upstream: &[f64],
    ) -> Result<Gradients> {
        if upstream.len() != self.output_dim() {
            return Err(EncoderError::UpstreamDimMismatch {
                expected: self.output_dim(),
                got: upstream.len(),
            });
        }
        let mut tape = Tape::new();
        let out = self.encode_state_on_tape(&mut tape, store, state)?;
        let u = tape.constant(Mat::row_vector(upstream));
        let prod = tape.mul(out, u)?;
        let loss = tape.row_sums(prod);
        Ok(tape.backward(loss, store)?)
    }

    /// Snapshots all per-class networks, sections ordered filter-then-
    /// abstraction within each class.
    pub fn to_checkpoint(&self, store: &ParamStore) -> Checkpoint {
        let mut ckpt = Checkpoint::new();
        for (j, nets) in self.classes.iter().enumerate() {
            ckpt.push(Section::from_mlp(&format!("class{j}.filter"), store, &nets.filter));
            ckpt.push(Section::from_mlp(&format!("class{j}.abstraction"), store, &nets.abstraction));
        }
        ckpt
    }

    /// Rebuilds an encoder from checkpoint sections, registering fresh
    /// parameters in `store`.
    pub fn from_checkpoint(
        store: &mut ParamStore,
        spec: EncoderSpec,
        ckpt: &Checkpoint,
    ) -> Result<Self> {
        spec.validate()?;
        let mut classes = Vec::with_capacity(spec.class_count());
        for j in 0..spec.class_count() {
            let filter = ckpt.section(&format!("class{j}.filter"))?.into_mlp(store)?;
            let abstraction = ckpt.section(&format!("class{j}.abstraction"))?.into_mlp(store)?;
            classes.push(ClassNets { filter, abstraction });
        }
        Ok(Self { spec, classes })
    }
}
