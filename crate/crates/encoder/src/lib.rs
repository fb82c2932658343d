//! Permutation-invariant set encoding for reinforcement-learning states.
//!
//! States that contain a variable number of interchangeable objects (food
//! particles, attackers, ...) are encoded by scoring each object with a filter
//! network, softmax-normalizing the scores into attention weights, and summing
//! the weighted outputs of an abstraction network. The result has a fixed
//! dimension regardless of how many objects are present and is unchanged by
//! any reordering of same-class objects. Multiple object classes get
//! independent networks; their pooled vectors are concatenated along with a
//! pass-through ego block.

mod encoder;
mod error;
mod object_set;
mod spec;

pub use encoder::{ClassNets, EncoderParams};
pub use error::{EncoderError, Result};
pub use object_set::ObjectSet;
pub use spec::{ClassSpec, EncoderSpec, DEFAULT_HIDDEN_WIDTH};
