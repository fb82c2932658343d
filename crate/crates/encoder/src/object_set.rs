//! Variable-size observations grouped into exchangeable classes.

use setpool_nn::Mat;

/// One observed state: per-class object matrices plus a non-exchangeable ego
/// vector.
///
/// Class `j` is an `m_j x n_j` matrix holding one object per row; `m_j` may be
/// zero (an empty matrix still carries its column count, so dimensions stay
/// checkable). Objects within a class are interchangeable — every consumer of
/// this type must produce the same result for any row ordering. The ego slice
/// is ordinary fixed state and is never pooled.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectSet {
    classes: Vec<Mat>,
    ego: Vec<f64>,
}

impl ObjectSet {
    pub fn new(classes: Vec<Mat>, ego: Vec<f64>) -> Self {
        Self { classes, ego }
    }

    /// Single-class set without ego state.
    pub fn single_class(objects: Mat) -> Self {
        Self { classes: vec![objects], ego: Vec::new() }
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn class(&self, j: usize) -> &Mat {
        &self.classes[j]
    }

    pub fn classes(&self) -> &[Mat] {
        &self.classes
    }

    pub fn ego(&self) -> &[f64] {
        &self.ego
    }

    /// Total object count across classes.
    pub fn object_count(&self) -> usize {
        self.classes.iter().map(Mat::rows).sum()
    }

    /// Copy with the rows of class `j` reordered by `perm`, where the new row
    /// `i` is the old row `perm[i]`. Used to exercise invariance; `perm` must
    /// be a permutation of `0..m_j`.
    pub fn with_permuted_class(&self, j: usize, perm: &[usize]) -> Self {
        let src = &self.classes[j];
        assert_eq!(perm.len(), src.rows(), "permutation length must match row count");
        let rows: Vec<&[f64]> = perm.iter().map(|&i| src.row(i)).collect();
        let permuted = if rows.is_empty() {
            Mat::zeros(0, src.cols())
        } else {
            Mat::from_rows(&rows).expect("rows share the class dimension")
        };
        let mut classes = self.classes.clone();
        classes[j] = permuted;
        Self { classes, ego: self.ego.clone() }
    }
}
