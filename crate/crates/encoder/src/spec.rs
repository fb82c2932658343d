//! Architecture description for a multi-class set encoder.

use serde::{Deserialize, Serialize};

use crate::error::{EncoderError, Result};

/// Hidden width used for both per-class networks unless overridden.
pub const DEFAULT_HIDDEN_WIDTH: usize = 64;

fn default_hidden() -> Vec<usize> {
    vec![DEFAULT_HIDDEN_WIDTH]
}

/// Networks for one object class: a scalar-scoring filter net and a
/// `k`-dimensional abstraction net, both over `input_dim`-vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassSpec {
    /// Object vector dimension `n` for this class.
    pub input_dim: usize,
    /// Pooled output dimension `k` for this class.
    pub abstract_dim: usize,
    /// Hidden widths of the filter net; empty means a single affine layer.
    #[serde(default = "default_hidden")]
    pub filter_hidden: Vec<usize>,
    /// Hidden widths of the abstraction net; empty means a single affine layer.
    #[serde(default = "default_hidden")]
    pub abstraction_hidden: Vec<usize>,
}

impl ClassSpec {
    pub fn new(input_dim: usize, abstract_dim: usize) -> Self {
        Self {
            input_dim,
            abstract_dim,
            filter_hidden: default_hidden(),
            abstraction_hidden: default_hidden(),
        }
    }
}

/// Full encoder architecture: one [`ClassSpec`] per object class plus the
/// dimension of the non-exchangeable ego block appended after pooling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EncoderSpec {
    pub classes: Vec<ClassSpec>,
    #[serde(default)]
    pub ego_dim: usize,
}

impl EncoderSpec {
    pub fn new(classes: Vec<ClassSpec>, ego_dim: usize) -> Result<Self> {
        let spec = Self { classes, ego_dim };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.classes.is_empty() {
            return Err(EncoderError::InvalidSpec("at least one object class is required".into()));
        }
        for (j, class) in self.classes.iter().enumerate() {
            if class.input_dim == 0 {
                return Err(EncoderError::InvalidSpec(format!("class {j}: input_dim must be >= 1")));
            }
            if class.abstract_dim == 0 {
                return Err(EncoderError::InvalidSpec(format!("class {j}: abstract_dim must be >= 1")));
            }
            if class.filter_hidden.contains(&0) || class.abstraction_hidden.contains(&0) {
                return Err(EncoderError::InvalidSpec(format!("class {j}: zero hidden width")));
            }
        }
        Ok(())
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    /// Length of the encoded state: pooled dims in class order, then ego.
    pub fn output_dim(&self) -> usize {
        self.classes.iter().map(|c| c.abstract_dim).sum::<usize>() + self.ego_dim
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn output_dim_sums_classes_and_ego() {
        let spec = EncoderSpec::new(vec![ClassSpec::new(2, 4), ClassSpec::new(3, 6)], 2).unwrap();
        assert_eq!(spec.output_dim(), 12);
        assert_eq!(spec.class_count(), 2);
    }

    #[test]
    fn zero_dims_are_rejected() {
        assert!(EncoderSpec::new(vec![], 0).is_err());
        assert!(EncoderSpec::new(vec![ClassSpec::new(0, 4)], 0).is_err());
        assert!(EncoderSpec::new(vec![ClassSpec::new(2, 0)], 0).is_err());
        let mut bad = ClassSpec::new(2, 2);
        bad.filter_hidden = vec![8, 0];
        assert!(EncoderSpec::new(vec![bad], 0).is_err());
    }

    #[test]
    fn defaults_use_standard_hidden_width() {
        let class = ClassSpec::new(2, 4);
        assert_eq!(class.filter_hidden, vec![DEFAULT_HIDDEN_WIDTH]);
        assert_eq!(class.abstraction_hidden, vec![DEFAULT_HIDDEN_WIDTH]);
    }
}
