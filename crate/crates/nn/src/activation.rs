//! Elementwise activation functions.

use crate::mat::Mat;

/// Leak slope used when a spec does not say otherwise.
pub const DEFAULT_LEAK_SLOPE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Relu,
    LeakyRelu,
    Identity,
}

impl Activation {
    /// Forward value. `slope` is only read for `LeakyRelu`.
    ///
    /// Conventions: `relu(x) = max(0, x)`; `leaky_relu(x) = x` for `x >= 0`,
    /// `slope * x` otherwise.
    #[inline]
    pub fn apply(self, x: f64, slope: f64) -> f64 {
        match self {
            Activation::Relu => x.max(0.0),
            Activation::LeakyRelu => {
                if x >= 0.0 {
                    x
                } else {
                    slope * x
                }
            }
            Activation::Identity => x,
        }
    }

    /// Derivative with respect to the pre-activation input. At `x == 0` the
    /// subgradient is 0 for relu and 1 for leaky relu, matching `apply`'s
    /// branch choice.
    #[inline]
    pub fn derivative(self, x: f64, slope: f64) -> f64 {
        match self {
            Activation::Relu => {
                if x > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::LeakyRelu => {
                if x >= 0.0 {
                    1.0
                } else {
                    slope
                }
            }
            Activation::Identity => 1.0,
        }
    }

    /// Stable tag used by the parameter file format.
    pub fn tag(self) -> u8 {
        match self {
            Activation::Relu => 0,
            Activation::LeakyRelu => 1,
            Activation::Identity => 2,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            0 => Some(Activation::Relu),
            1 => Some(Activation::LeakyRelu),
            2 => Some(Activation::Identity),
            _ => None,
        }
    }
}

/// Applies `kind` elementwise. Total over finite inputs.
pub fn activation_forward(x: &Mat, kind: Activation, slope: f64) -> Mat {
    x.map(|v| kind.apply(v, slope))
}
