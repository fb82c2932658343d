//! The two state representations a policy can train on.

use setpool_encoder::{EncoderParams, EncoderSpec};
use setpool_envs::Environment;
use setpool_nn::{derive_seed, Mat, NodeId, ParamStore, Tape};

use crate::error::{PpoError, Result};
use crate::rollout::Observation;

/// Which representation to build when a trainer is constructed.
#[derive(Debug, Clone)]
pub enum ReprSpec {
    /// Fixed-arity zero-padded vector straight from the environment.
    Baseline,
    /// Attention-pooled set encoding, learned jointly with the policy.
    Encoder(EncoderSpec),
}

/// A constructed representation bound to a parameter store.
#[derive(Debug)]
pub enum Repr {
    Baseline { dim: usize },
    Encoder(EncoderParams),
}

impl Repr {
    pub fn build(
        spec: &ReprSpec,
        store: &mut ParamStore,
        flat_dim: usize,
        seed: u64,
    ) -> Result<Self> {
        match spec {
            ReprSpec::Baseline => Ok(Repr::Baseline { dim: flat_dim }),
            ReprSpec::Encoder(enc) => {
                let params =
                    EncoderParams::init(store, enc.clone(), derive_seed(seed, "encoder-init"))?;
                Ok(Repr::Encoder(params))
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Repr::Baseline { dim } => *dim,
            Repr::Encoder(params) => params.output_dim(),
        }
    }

    pub fn encoder(&self) -> Option<&EncoderParams> {
        match self {
            Repr::Baseline { .. } => None,
            Repr::Encoder(params) => Some(params),
        }
    }

    /// Captures the environment state in this representation's input form and
    /// computes the representation vector the policy consumes.
    pub fn observe(
        &self,
        store: &ParamStore,
        env: &dyn Environment,
    ) -> Result<(Observation, Vec<f64>)> {
        match self {
            Repr::Baseline { dim } => {
                let flat = env.flat_observation();
                if flat.len() != *dim {
                    return Err(PpoError::Config(format!(
                        "environment emits {} baseline values, trainer was built for {}",
                        flat.len(),
                        dim
                    )));
                }
                Ok((Observation::Flat(flat.clone()), flat))
            }
            Repr::Encoder(params) => {
                let set = env.object_set();
                let vec = params.encode_state(store, &set)?;
                Ok((Observation::Set(set), vec))
            }
        }
    }

    /// Representation vector for a stored observation, off-tape.
    pub fn encode_plain(&self, store: &ParamStore, obs: &Observation) -> Result<Vec<f64>> {
        match (self, obs) {
            (Repr::Baseline { .. }, Observation::Flat(v)) => Ok(v.clone()),
            (Repr::Encoder(params), Observation::Set(set)) => {
                Ok(params.encode_state(store, set)?)
            }
            _ => Err(PpoError::Config(
                "observation kind does not match the active representation".into(),
            )),
        }
    }

    /// One tape node of shape `batch × dim` holding the representations of
    /// `observations`; for the encoder this re-records the full encoding
    /// graph so gradients reach encoder parameters.
    pub fn batch_node(
        &self,
        tape: &mut Tape,
        store: &ParamStore,
        observations: &[&Observation],
    ) -> Result<NodeId> {
        match self {
            Repr::Baseline { dim } => {
                let mut data = Vec::with_capacity(observations.len() * dim);
                for obs in observations {
                    match obs {
                        Observation::Flat(v) if v.len() == *dim => data.extend_from_slice(v),
                        Observation::Flat(v) => {
                            return Err(PpoError::Config(format!(
                                "baseline observation has {} values, expected {}",
                                v.len(),
                                dim
                            )))
                        }
                        Observation::Set(_) => {
                            return Err(PpoError::Config(
                                "set observation fed to a baseline representation".into(),
                            ))
                        }
                    }
                }
                Ok(tape.constant(Mat::from_vec(observations.len(), *dim, data)?))
            }
            Repr::Encoder(params) => {
                let mut rows = Vec::with_capacity(observations.len());
                for obs in observations {
                    match obs {
                        Observation::Set(set) => {
                            rows.push(params.encode_state_on_tape(tape, store, set)?);
                        }
                        Observation::Flat(_) => {
                            return Err(PpoError::Config(
                                "flat observation fed to the encoder representation".into(),
                            ))
                        }
                    }
                }
                Ok(tape.concat_rows(&rows)?)
            }
        }
    }
}
