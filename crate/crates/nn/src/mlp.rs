//! Fully connected networks over [`Mat`] batches.
//!
//! The convention throughout is row-major batches: input row `i` produces
//! output row `i`, and no operation mixes rows. That property is what later
//! lets set encoders process a whole object set as one matrix while keeping
//! per-object semantics.

use crate::activation::{activation_forward, Activation};
use crate::error::{shape_err, NnError, Result};
use crate::mat::Mat;
use crate::seed::seeded_rng;
use crate::store::{ParamId, ParamStore};
use crate::tape::{NodeId, Tape};
use rand::Rng;

/// `x * w + b`, with the bias row added to every row of the product.
pub fn affine_forward(x: &Mat, w: &Mat, b: &Mat) -> Result<Mat> {
    if x.cols() != w.rows() {
        return Err(shape_err(
            "affine_forward",
            format!("input is {}x{}, weight is {}x{}", x.rows(), x.cols(), w.rows(), w.cols()),
        ));
    }
    if b.rows() != 1 || b.cols() != w.cols() {
        return Err(shape_err(
            "affine_forward",
            format!("bias is {}x{}, expected 1x{}", b.rows(), b.cols(), w.cols()),
        ));
    }
    let mut out = x.matmul(w)?;
    for i in 0..out.rows() {
        for j in 0..out.cols() {
            let v = out.get(i, j) + b.get(0, j);
            out.set(i, j, v);
        }
    }
    Ok(out)
}

/// Architecture of a fully connected network.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpSpec {
    /// Layer widths including the input dimension, e.g. `[4, 64, 64, 2]`.
    pub widths: Vec<usize>,
    /// Activation applied after every layer except the last, which stays linear.
    pub activation: Activation,
    /// Negative-side slope used when `activation` is leaky.
    pub leak_slope: f64,
}

impl MlpSpec {
    pub fn new(widths: Vec<usize>, activation: Activation, leak_slope: f64) -> Result<Self> {
        let spec = Self { widths, activation, leak_slope };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.widths.len() < 2 {
            return Err(NnError::InvalidSpec(format!(
                "need at least an input and an output width, got {:?}",
                self.widths
            )));
        }
        if let Some(&w) = self.widths.iter().find(|&&w| w == 0) {
            return Err(NnError::InvalidSpec(format!("zero layer width {w} is not allowed")));
        }
        if !self.leak_slope.is_finite() {
            return Err(NnError::InvalidSpec("leak slope must be finite".into()));
        }
        Ok(())
    }

    pub fn input_dim(&self) -> usize {
        self.widths[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.widths.last().expect("validated spec has >= 2 widths")
    }

    /// Number of affine layers.
    pub fn layer_count(&self) -> usize {
        self.widths.len() - 1
    }

    /// Total trainable scalars: weights plus biases per layer.
    pub fn param_count(&self) -> usize {
        self.widths
            .windows(2)
            .map(|pair| pair[0] * pair[1] + pair[1])
            .sum()
    }
}

/// A fully connected network whose parameters live in a [`ParamStore`].
#[derive(Debug, Clone)]
pub struct Mlp {
    spec: MlpSpec,
    /// `(weight, bias)` handle per layer.
    layers: Vec<(ParamId, ParamId)>,
    init_seed: u64,
}

impl Mlp {
    /// Initializes weights uniformly with variance scaled to the fan-in
    /// (`U(-1, 1) * sqrt(2 / fan_in)`) and biases to zero, drawing from a
    /// deterministic stream so equal seeds give equal networks.
    pub fn init(store: &mut ParamStore, spec: MlpSpec, seed: u64) -> Result<Self> {
        spec.validate()?;
        let mut rng = seeded_rng(seed);
        let mut layers = Vec::with_capacity(spec.layer_count());
        for pair in spec.widths.windows(2) {
            let (fan_in, fan_out) = (pair[0], pair[1]);
            let gain = (2.0 / fan_in as f64).sqrt();
            let mut w = Mat::zeros(fan_in, fan_out);
            for i in 0..fan_in {
                for j in 0..fan_out {
                    w.set(i, j, rng.gen_range(-1.0..1.0) * gain);
                }
            }
            let weight = store.register(w);
            let bias = store.register(Mat::zeros(1, fan_out));
            layers.push((weight, bias));
        }
        Ok(Self { spec, layers, init_seed: seed })
    }

    /// Rebuilds a network around existing parameter handles, checking that
    /// their shapes match the spec.
    pub fn from_params(
        store: &ParamStore,
        spec: MlpSpec,
        layers: Vec<(ParamId, ParamId)>,
        init_seed: u64,
    ) -> Result<Self> {
        spec.validate()?;
        if layers.len() != spec.layer_count() {
            return Err(NnError::InvalidSpec(format!(
                "spec has {} layers but {} parameter pairs were given",
                spec.layer_count(),
                layers.len()
            )));
        }
        for (idx, (pair, &(w, b))) in spec.widths.windows(2).zip(&layers).enumerate() {
            let (wv, bv) = (store.get(w), store.get(b));
            if wv.rows() != pair[0] || wv.cols() != pair[1] || bv.rows() != 1 || bv.cols() != pair[1] {
                return Err(NnError::InvalidSpec(format!(
                    "layer {idx} parameters are {}x{} and {}x{}, spec wants {}x{} and 1x{}",
                    wv.rows(),
                    wv.cols(),
                    bv.rows(),
                    bv.cols(),
                    pair[0],
                    pair[1],
                    pair[1]
                )));
            }
        }
        Ok(Self { spec, layers, init_seed })
    }

    pub fn spec(&self) -> &MlpSpec {
        &self.spec
    }

    pub fn init_seed(&self) -> u64 {
        self.init_seed
    }

    /// `(weight, bias)` handles in layer order.
    pub fn layer_params(&self) -> &[(ParamId, ParamId)] {
        &self.layers
    }

    /// All parameter handles in a stable order (weight then bias per layer).
    pub fn param_ids(&self) -> Vec<ParamId> {
        self.layers.iter().flat_map(|&(w, b)| [w, b]).collect()
    }

    /// Forward pass over a batch, one input per row.
    pub fn forward(&self, store: &ParamStore, x: &Mat) -> Result<Mat> {
        if x.cols() != self.spec.input_dim() {
            return Err(shape_err(
                "mlp_forward",
                format!("input has {} columns, network expects {}", x.cols(), self.spec.input_dim()),
            ));
        }
        let mut h = x.clone();
        let last = self.layers.len() - 1;
        for (idx, &(w, b)) in self.layers.iter().enumerate() {
            h = affine_forward(&h, store.get(w), store.get(b))?;
            if idx != last {
                h = activation_forward(&h, self.spec.activation, self.spec.leak_slope);
            }
        }
        Ok(h)
    }

    /// Forward pass recorded on a tape, for differentiation.
    pub fn forward_on_tape(&self, tape: &mut Tape, store: &ParamStore, x: NodeId) -> Result<NodeId> {
        if tape.value(x).cols() != self.spec.input_dim() {
            return Err(shape_err(
                "mlp_forward",
                format!(
                    "input has {} columns, network expects {}",
                    tape.value(x).cols(),
                    self.spec.input_dim()
                ),
            ));
        }
        let mut h = x;
        let last = self.layers.len() - 1;
        for (idx, &(w, b)) in self.layers.iter().enumerate() {
            let wn = tape.param(store, w);
            let bn = tape.param(store, b);
            h = tape.affine(h, wn, bn)?;
            if idx != last {
                h = tape.activation(h, self.spec.activation, self.spec.leak_slope);
            }
        }
        Ok(h)
    }
}

/// Convenience wrapper: forward pass of `mlp` on `x`.
pub fn mlp_forward(store: &ParamStore, mlp: &Mlp, x: &Mat) -> Result<Mat> {
    mlp.forward(store, x)
}
