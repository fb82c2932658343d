//! Central ownership of trainable parameters.
//!
//! Every model in this workspace (MLPs, set encoders, policies) stores
//! [`ParamId`] handles rather than owning its matrices. The [`ParamStore`]
//! owns the actual values, which makes it possible to run a single optimizer
//! over parameters shared by several model components and to accumulate
//! gradients from many tape subgraphs into one slot per parameter.

use crate::error::{NnError, Result};
use crate::mat::Mat;

/// Stable handle for one parameter matrix inside a [`ParamStore`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ParamId(pub(crate) usize);

impl ParamId {
    /// Index of this parameter within its store, in registration order.
    pub fn index(self) -> usize {
        self.0
    }
}

/// Owns every trainable matrix and hands out [`ParamId`] handles.
#[derive(Debug, Clone, Default)]
pub struct ParamStore {
    params: Vec<Mat>,
}

impl ParamStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers a new parameter, returning its handle.
    pub fn register(&mut self, value: Mat) -> ParamId {
        let id = ParamId(self.params.len());
        self.params.push(value);
        id
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn get(&self, id: ParamId) -> &Mat {
        &self.params[id.0]
    }

    pub fn get_mut(&mut self, id: ParamId) -> &mut Mat {
        &mut self.params[id.0]
    }

    /// Replaces a parameter's value, keeping its shape.
    pub fn set(&mut self, id: ParamId, value: Mat) -> Result<()> {
        let current = &self.params[id.0];
        if current.rows() != value.rows() || current.cols() != value.cols() {
            return Err(NnError::ShapeMismatch {
                op: "ParamStore::set",
                detail: format!(
                    "parameter {} is {}x{}, replacement is {}x{}",
                    id.0,
                    current.rows(),
                    current.cols(),
                    value.rows(),
                    value.cols()
                ),
            });
        }
        self.params[id.0] = value;
        Ok(())
    }

    /// All handles in registration order.
    pub fn ids(&self) -> impl Iterator<Item = ParamId> {
        (0..self.params.len()).map(ParamId)
    }

    /// Total number of scalar entries across all parameters.
    pub fn scalar_count(&self) -> usize {
        self.params.iter().map(Mat::len).sum()
    }

    /// True when every entry of every parameter is finite.
    pub fn all_finite(&self) -> bool {
        self.params.iter().all(Mat::is_finite)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn register_and_fetch_round_trip() {
        let mut store = ParamStore::new();
        let a = store.register(Mat::filled(2, 3, 1.5));
        let b = store.register(Mat::zeros(1, 4));
        assert_eq!(store.len(), 2);
        assert_eq!(store.get(a).get(1, 2), 1.5);
        assert_eq!(store.get(b).cols(), 4);
        assert_eq!(store.scalar_count(), 10);
    }

    #[test]
    fn set_rejects_shape_change() {
        let mut store = ParamStore::new();
        let id = store.register(Mat::zeros(2, 2));
        assert!(store.set(id, Mat::zeros(3, 2)).is_err());
        assert!(store.set(id, Mat::filled(2, 2, 7.0)).is_ok());
        assert_eq!(store.get(id).get(0, 0), 7.0);
    }

    #[test]
    fn ids_enumerate_in_registration_order() {
        let mut store = ParamStore::new();
        let a = store.register(Mat::zeros(1, 1));
        let b = store.register(Mat::zeros(1, 1));
        let collected: Vec<ParamId> = store.ids().collect();
        assert_eq!(collected, vec![a, b]);
    }
}
