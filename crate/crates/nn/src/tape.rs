//! Reverse-mode differentiation over an explicit operation tape.
//!
//! Forward calls record one node per operation, computing values eagerly.
//! [`Tape::backward`] then walks the record once in reverse, accumulating an
//! adjoint per node and finally per trainable parameter. Parameters are
//! memoized: pulling the same [`ParamId`] onto a tape twice yields the same
//! leaf node, so gradients from every use of a shared parameter (for example
//! an encoder applied to each state in a minibatch) land in a single slot.

use std::collections::BTreeMap;

use crate::activation::Activation;
use crate::error::{shape_err, NnError, Result};
use crate::mat::Mat;
use crate::softmax::softmax_column;
use crate::store::{ParamId, ParamStore};

/// Handle for one node on a [`Tape`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NodeId(usize);

#[derive(Debug, Clone)]
enum Op {
    /// Constant input; no gradient flows past it.
    Leaf,
    /// Trainable parameter leaf.
    Param(ParamId),
    /// `x * w + b` with `b` a single row broadcast over the rows of the product.
    Affine { x: NodeId, w: NodeId, b: NodeId },
    Activation { x: NodeId, kind: Activation, slope: f64 },
    /// Softmax over a single column vector.
    SoftmaxCol { x: NodeId },
    /// Row-wise scaling: `out[i][j] = z[i][j] * w[i][0]`.
    ScaleRows { z: NodeId, w: NodeId },
    ColSums { x: NodeId },
    RowSums { x: NodeId },
    ConcatCols { parts: Vec<NodeId> },
    ConcatRows { parts: Vec<NodeId> },
    /// Repeat a `1 x k` row `rows` times.
    BroadcastRows { x: NodeId },
    Add { a: NodeId, b: NodeId },
    Sub { a: NodeId, b: NodeId },
    /// Elementwise product.
    Mul { a: NodeId, b: NodeId },
    Exp { x: NodeId },
    Scale { x: NodeId, c: f64 },
    AddScalar { x: NodeId },
    Clip { x: NodeId, lo: f64, hi: f64 },
    /// Elementwise minimum; ties propagate the gradient to `a`.
    MinElem { a: NodeId, b: NodeId },
    /// Mean over all entries, producing a `1 x 1` matrix.
    MeanAll { x: NodeId },
}

#[derive(Debug, Clone)]
struct Node {
    value: Mat,
    op: Op,
}

/// Gradients of a scalar loss with respect to store parameters.
///
/// Every parameter registered in the store passed to [`Tape::backward`] has an
/// entry; parameters that did not influence the loss map to zero matrices.
#[derive(Debug, Clone)]
pub struct Gradients {
    map: BTreeMap<ParamId, Mat>,
}

impl Gradients {
    pub fn get(&self, id: ParamId) -> &Mat {
        &self.map[&id]
    }

    pub fn iter(&self) -> impl Iterator<Item = (ParamId, &Mat)> {
        self.map.iter().map(|(id, m)| (*id, m))
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.map
            .values()
            .flat_map(|m| m.data().iter())
            .fold(0.0, |acc, v| acc.max(v.abs()))
    }

    pub fn all_finite(&self) -> bool {
        self.map.values().all(Mat::is_finite)
    }
}

/// Operation record for one forward computation.
#[derive(Debug, Default)]
pub struct Tape {
    nodes: Vec<Node>,
    param_leaves: BTreeMap<ParamId, NodeId>,
}

impl Tape {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Value computed at a node.
    pub fn value(&self, id: NodeId) -> &Mat {
        &self.nodes[id.0].value
    }

    fn push(&mut self, value: Mat, op: Op) -> NodeId {
        let id = NodeId(self.nodes.len());
        self.nodes.push(Node { value, op });
        id
    }

    /// Records a constant input. Gradient does not propagate past it.
    pub fn constant(&mut self, value: Mat) -> NodeId {
        self.push(value, Op::Leaf)
    }

    /// Pulls a parameter's current value onto the tape.
    ///
    /// Repeated calls with the same id return the same node, so all uses of a
    /// shared parameter accumulate into one gradient.
    pub fn param(&mut self, store: &ParamStore, id: ParamId) -> NodeId {
        if let Some(&node) = self.param_leaves.get(&id) {
            return node;
        }
        let node = self.push(store.get(id).clone(), Op::Param(id));
        self.param_leaves.insert(id, node);
        node
    }

    /// `x * w + b`, with `b` a `1 x h` row added to every output row.
    pub fn affine(&mut self, x: NodeId, w: NodeId, b: NodeId) -> Result<NodeId> {
        let (xv, wv, bv) = (self.value(x), self.value(w), self.value(b));
        if xv.cols() != wv.rows() {
            return Err(shape_err(
                "affine",
                format!("input is {}x{}, weight is {}x{}", xv.rows(), xv.cols(), wv.rows(), wv.cols()),
            ));
        }
        if bv.rows() != 1 || bv.cols() != wv.cols() {
            return Err(shape_err(
                "affine",
                format!("bias is {}x{}, expected 1x{}", bv.rows(), bv.cols(), wv.cols()),
            ));
        }
        let mut out = xv.matmul(wv)?;
        for i in 0..out.rows() {
            for j in 0..out.cols() {
                let v = out.get(i, j) + bv.get(0, j);
                out.set(i, j, v);
            }
        }
        Ok(self.push(out, Op::Affine { x, w, b }))
    }

    pub fn activation(&mut self, x: NodeId, kind: Activation, slope: f64) -> NodeId {
        let out = self.value(x).map(|v| kind.apply(v, slope));
        self.push(out, Op::Activation { x, kind, slope })
    }

    /// Softmax over a non-empty column vector (`m x 1`).
    pub fn softmax_col(&mut self, x: NodeId) -> Result<NodeId> {
        let xv = self.value(x);
        if xv.cols() != 1 {
            return Err(shape_err(
                "softmax_col",
                format!("expected a column vector, got {}x{}", xv.rows(), xv.cols()),
            ));
        }
        let weights = softmax_column(xv.data())?;
        let out = Mat::col_vector(&weights);
        Ok(self.push(out, Op::SoftmaxCol { x }))
    }

    /// Scales row `i` of `z` by `w[i][0]`.
    pub fn scale_rows(&mut self, z: NodeId, w: NodeId) -> Result<NodeId> {
        let (zv, wv) = (self.value(z), self.value(w));
        if wv.cols() != 1 || wv.rows() != zv.rows() {
            return Err(shape_err(
                "scale_rows",
                format!("matrix is {}x{}, scale column is {}x{}", zv.rows(), zv.cols(), wv.rows(), wv.cols()),
            ));
        }
        let mut out = zv.clone();
        for i in 0..out.rows() {
            let s = wv.get(i, 0);
            for j in 0..out.cols() {
                out.set(i, j, out.get(i, j) * s);
            }
        }
        Ok(self.push(out, Op::ScaleRows { z, w }))
    }

    /// Sums each column, producing a `1 x n` row.
    pub fn col_sums(&mut self, x: NodeId) -> NodeId {
        let out = self.value(x).col_sums();
        self.push(out, Op::ColSums { x })
    }

    /// Sums each row, producing an `m x 1` column.
    pub fn row_sums(&mut self, x: NodeId) -> NodeId {
        let out = self.value(x).row_sums();
        self.push(out, Op::RowSums { x })
    }

    /// Concatenates parts left-to-right; all parts must share a row count.
    pub fn concat_cols(&mut self, parts: &[NodeId]) -> Result<NodeId> {
        if parts.is_empty() {
            return Err(NnError::EmptyInput("concat_cols"));
        }
        let rows = self.value(parts[0]).rows();
        let mut cols = 0;
        for &p in parts {
            let v = self.value(p);
            if v.rows() != rows {
                return Err(shape_err(
                    "concat_cols",
                    format!("parts have {} and {} rows", rows, v.rows()),
                ));
            }
            cols += v.cols();
        }
        let mut out = Mat::zeros(rows, cols);
        let mut offset = 0;
        for &p in parts {
            let v = self.value(p);
            for i in 0..rows {
                for j in 0..v.cols() {
                    out.set(i, offset + j, v.get(i, j));
                }
            }
            offset += v.cols();
        }
        Ok(self.push(out, Op::ConcatCols { parts: parts.to_vec() }))
    }

    /// Stacks parts top-to-bottom; all parts must share a column count.
    pub fn concat_rows(&mut self, parts: &[NodeId]) -> Result<NodeId> {
        if parts.is_empty() {
            return Err(NnError::EmptyInput("concat_rows"));
        }
        let cols = self.value(parts[0]).cols();
        let mut rows = 0;
        for &p in parts {
            let v = self.value(p);
            if v.cols() != cols {
                return Err(shape_err(
                    "concat_rows",
                    format!("parts have {} and {} columns", cols, v.cols()),
                ));
            }
            rows += v.rows();
        }
        let mut out = Mat::zeros(rows, cols);
        let mut offset = 0;
        for &p in parts {
            let v = self.value(p);
            for i in 0..v.rows() {
                for j in 0..cols {
                    out.set(offset + i, j, v.get(i, j));
                }
            }
            offset += v.rows();
        }
        Ok(self.push(out, Op::ConcatRows { parts: parts.to_vec() }))
    }

    /// Repeats a `1 x k` row to form a `rows x k` matrix.
    pub fn broadcast_rows(&mut self, x: NodeId, rows: usize) -> Result<NodeId> {
        let xv = self.value(x);
        if xv.rows() != 1 {
            return Err(shape_err(
                "broadcast_rows",
                format!("expected a single row, got {}x{}", xv.rows(), xv.cols()),
            ));
        }
        let mut out = Mat::zeros(rows, xv.cols());
        for i in 0..rows {
            for j in 0..xv.cols() {
                out.set(i, j, xv.get(0, j));
            }
        }
        Ok(self.push(out, Op::BroadcastRows { x }))
    }

    fn binary_same_shape(&self, op: &'static str, a: NodeId, b: NodeId) -> Result<()> {
        let (av, bv) = (self.value(a), self.value(b));
        if av.rows() != bv.rows() || av.cols() != bv.cols() {
            return Err(shape_err(
                op,
                format!("{}x{} vs {}x{}", av.rows(), av.cols(), bv.rows(), bv.cols()),
            ));
        }
        Ok(())
    }

    pub fn add(&mut self, a: NodeId, b: NodeId) -> Result<NodeId> {
        self.binary_same_shape("add", a, b)?;
        let out = self.value(a).zip_map(self.value(b), |x, y| x + y)?;
        Ok(self.push(out, Op::Add { a, b }))
    }

    pub fn sub(&mut self, a: NodeId, b: NodeId) -> Result<NodeId> {
        self.binary_same_shape("sub", a, b)?;
        let out = self.value(a).zip_map(self.value(b), |x, y| x - y)?;
        Ok(self.push(out, Op::Sub { a, b }))
    }

    /// Elementwise product.
    pub fn mul(&mut self, a: NodeId, b: NodeId) -> Result<NodeId> {
        self.binary_same_shape("mul", a, b)?;
        let out = self.value(a).zip_map(self.value(b), |x, y| x * y)?;
        Ok(self.push(out, Op::Mul { a, b }))
    }

    /// Elementwise `exp`. Overflow to infinity is reported as an error so
    /// callers can treat exploded likelihood ratios as divergence.
    pub fn exp(&mut self, x: NodeId) -> Result<NodeId> {
        let out = self.value(x).map(f64::exp);
        if !out.is_finite() {
            return Err(NnError::NonFinite("exp"));
        }
        Ok(self.push(out, Op::Exp { x }))
    }

    pub fn scale(&mut self, x: NodeId, c: f64) -> NodeId {
        let out = self.value(x).map(|v| v * c);
        self.push(out, Op::Scale { x, c })
    }

    pub fn add_scalar(&mut self, x: NodeId, c: f64) -> NodeId {
        let out = self.value(x).map(|v| v + c);
        self.push(out, Op::AddScalar { x })
    }

    /// Clamps entries to `[lo, hi]`. Gradient passes through entries at the
    /// boundary values themselves.
    pub fn clip(&mut self, x: NodeId, lo: f64, hi: f64) -> NodeId {
        let out = self.value(x).map(|v| v.clamp(lo, hi));
        self.push(out, Op::Clip { x, lo, hi })
    }

    /// Elementwise minimum of two same-shape matrices.
    pub fn min_elem(&mut self, a: NodeId, b: NodeId) -> Result<NodeId> {
        self.binary_same_shape("min_elem", a, b)?;
        let out = self.value(a).zip_map(self.value(b), f64::min)?;
        Ok(self.push(out, Op::MinElem { a, b }))
    }

    /// Mean over all entries, producing a `1 x 1` scalar node.
    pub fn mean_all(&mut self, x: NodeId) -> NodeId {
        let xv = self.value(x);
        let mean = xv.data().iter().sum::<f64>() / xv.len() as f64;
        self.push(Mat::scalar(mean), Op::MeanAll { x })
    }

    /// Reverse pass from a scalar loss node.
    ///
    /// Returns one gradient per parameter registered in `store`; parameters
    /// the loss never touched get zero matrices.
    pub fn backward(&self, loss: NodeId, store: &ParamStore) -> Result<Gradients> {
        if loss.0 >= self.nodes.len() {
            return Err(NnError::NotOnTape);
        }
        let loss_val = &self.nodes[loss.0].value;
        if loss_val.rows() != 1 || loss_val.cols() != 1 {
            return Err(NnError::NonScalarLoss {
                rows: loss_val.rows(),
                cols: loss_val.cols(),
            });
        }
        if !loss_val.is_finite() {
            return Err(NnError::NonFinite("loss"));
        }

        let mut adjoints: Vec<Option<Mat>> = vec![None; self.nodes.len()];
        adjoints[loss.0] = Some(Mat::scalar(1.0));

        for idx in (0..=loss.0).rev() {
            let g = match adjoints[idx].take() {
                Some(g) => g,
                None => continue,
            };
            match &self.nodes[idx].op {
                Op::Leaf => {
                    adjoints[idx] = Some(g);
                    continue;
                }
                Op::Param(id) => {
                    debug_assert_eq!(self.param_leaves.get(id), Some(&NodeId(idx)));
                    adjoints[idx] = Some(g);
                    continue;
                }
                Op::Affine { x, w, b } => {
                    let dx = g.matmul_nt(&self.nodes[w.0].value)?;
                    let dw = self.nodes[x.0].value.matmul_tn(&g)?;
                    let db = g.col_sums();
                    self.accumulate(&mut adjoints, *x, dx);
                    self.accumulate(&mut adjoints, *w, dw);
                    self.accumulate(&mut adjoints, *b, db);
                }
                Op::Activation { x, kind, slope } => {
                    let dx = self.nodes[x.0].value.zip_map(&g, |pre, gv| kind.derivative(pre, *slope) * gv)?;
                    self.accumulate(&mut adjoints, *x, dx);
                }
                Op::SoftmaxCol { x } => {
                    let y = &self.nodes[idx].value;
                    let dot: f64 = (0..y.rows()).map(|i| y.get(i, 0) * g.get(i, 0)).sum();
                    let mut dx = Mat::zeros(y.rows(), 1);
                    for i in 0..y.rows() {
                        dx.set(i, 0, y.get(i, 0) * (g.get(i, 0) - dot));
                    }
                    self.accumulate(&mut adjoints, *x, dx);
                }
                Op::ScaleRows { z, w } => {
                    let zv = &self.nodes[z.0].value;
                    let wv = &self.nodes[w.0].value;
                    let mut dz = Mat::zeros(zv.rows(), zv.cols());
                    let mut dw = Mat::zeros(wv.rows(), 1);
                    for i in 0..zv.rows() {
                        let s = wv.get(i, 0);
                        let mut acc = 0.0;
                        for j in 0..zv.cols() {
                            dz.set(i, j, g.get(i, j) * s);
                            acc += g.get(i, j) * zv.get(i, j);
                        }
                        dw.set(i, 0, acc);
                    }
                    self.accumulate(&mut adjoints, *z, dz);
                    self.accumulate(&mut adjoints, *w, dw);
                }
                Op::ColSums { x } => {
                    let xv = &self.nodes[x.0].value;
                    let mut dx = Mat::zeros(xv.rows(), xv.cols());
                    for i in 0..xv.rows() {
                        for j in 0..xv.cols() {
                            dx.set(i, j, g.get(0, j));
                        }
                    }
                    self.accumulate(&mut adjoints, *x, dx);
                }
                Op::RowSums { x } => {
                    let xv = &self.nodes[x.0].value;
                    let mut dx = Mat::zeros(xv.rows(), xv.cols());
                    for i in 0..xv.rows() {
                        for j in 0..xv.cols() {
                            dx.set(i, j, g.get(i, 0));
                        }
                    }
                    self.accumulate(&mut adjoints, *x, dx);
                }
                Op::ConcatCols { parts } => {
                    let mut offset = 0;
                    for &p in parts {
                        let v = &self.nodes[p.0].value;
                        let mut dp = Mat::zeros(v.rows(), v.cols());
                        for i in 0..v.rows() {
                            for j in 0..v.cols() {
                                dp.set(i, j, g.get(i, offset + j));
                            }
                        }
                        offset += v.cols();
                        self.accumulate(&mut adjoints, p, dp);
                    }
                }
                Op::ConcatRows { parts } => {
                    let mut offset = 0;
                    for &p in parts {
                        let v = &self.nodes[p.0].value;
                        let mut dp = Mat::zeros(v.rows(), v.cols());
                        for i in 0..v.rows() {
                            for j in 0..v.cols() {
                                dp.set(i, j, g.get(offset + i, j));
                            }
                        }
                        offset += v.rows();
                        self.accumulate(&mut adjoints, p, dp);
                    }
                }
                Op::BroadcastRows { x } => {
                    self.accumulate(&mut adjoints, *x, g.col_sums());
                }
                Op::Add { a, b } => {
                    self.accumulate(&mut adjoints, *a, g.clone());
                    self.accumulate(&mut adjoints, *b, g);
                }
                Op::Sub { a, b } => {
                    let neg = g.map(|v| -v);
                    self.accumulate(&mut adjoints, *a, g);
                    self.accumulate(&mut adjoints, *b, neg);
                }
                Op::Mul { a, b } => {
                    let da = g.zip_map(&self.nodes[b.0].value, |gv, bv| gv * bv)?;
                    let db = g.zip_map(&self.nodes[a.0].value, |gv, av| gv * av)?;
                    self.accumulate(&mut adjoints, *a, da);
                    self.accumulate(&mut adjoints, *b, db);
                }
                Op::Exp { x } => {
                    let dx = g.zip_map(&self.nodes[idx].value, |gv, yv| gv * yv)?;
                    self.accumulate(&mut adjoints, *x, dx);
                }
                Op::Scale { x, c } => {
                    self.accumulate(&mut adjoints, *x, g.map(|v| v * c));
                }
                Op::AddScalar { x } => {
                    self.accumulate(&mut adjoints, *x, g);
                }
                Op::Clip { x, lo, hi } => {
                    let dx = self.nodes[x.0]
                        .value
                        .zip_map(&g, |xv, gv| if xv >= *lo && xv <= *hi { gv } else { 0.0 })?;
                    self.accumulate(&mut adjoints, *x, dx);
                }
                Op::MinElem { a, b } => {
                    let av = &self.nodes[a.0].value;
                    let bv = &self.nodes[b.0].value;
                    let mut da = Mat::zeros(av.rows(), av.cols());
                    let mut db = Mat::zeros(av.rows(), av.cols());
                    for i in 0..av.rows() {
                        for j in 0..av.cols() {
                            if av.get(i, j) <= bv.get(i, j) {
                                da.set(i, j, g.get(i, j));
                            } else {
                                db.set(i, j, g.get(i, j));
                            }
                        }
                    }
                    self.accumulate(&mut adjoints, *a, da);
                    self.accumulate(&mut adjoints, *b, db);
                }
                Op::MeanAll { x } => {
                    let xv = &self.nodes[x.0].value;
                    let scale = g.as_scalar()? / xv.len() as f64;
                    self.accumulate(&mut adjoints, *x, Mat::filled(xv.rows(), xv.cols(), scale));
                }
            }
        }

        let mut map = BTreeMap::new();
        for id in store.ids() {
            let grad = self
                .param_leaves
                .get(&id)
                .and_then(|node| adjoints[node.0].clone())
                .unwrap_or_else(|| {
                    let p = store.get(id);
                    Mat::zeros(p.rows(), p.cols())
                });
            map.insert(id, grad);
        }
        Ok(Gradients { map })
    }

    fn accumulate(&self, adjoints: &mut [Option<Mat>], target: NodeId, grad: Mat) {
        match &mut adjoints[target.0] {
            Some(existing) => existing.axpy(1.0, &grad).expect("adjoint shapes agree"),
            slot @ None => *slot = Some(grad),
        }
    }
}
