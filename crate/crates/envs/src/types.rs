//! Shared episode interface and step outcome types.

use setpool_encoder::ObjectSet;

use crate::error::Result;

/// Why an episode ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminalCause {
    ReachedFood,
    ReachedPoison,
    Timeout,
    /// Every convoy member has either reached the goal or been destroyed.
    ConvoyResolved,
}

/// Diagnostics attached to one step.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StepInfo {
    /// Present exactly when the step ended the episode.
    pub terminal_cause: Option<TerminalCause>,
    /// Attackers the defender blocked this step.
    pub blocked: u32,
    /// Convoy members destroyed this step.
    pub members_lost: u32,
}

/// Outcome of one environment step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepResult {
    pub reward: f64,
    pub done: bool,
    pub info: StepInfo,
}

/// A seeded, resettable episode with both observation routes.
///
/// All tasks share a 2-component continuous action. Observations come in two
/// forms from the same underlying state: a variable-size [`ObjectSet`] for
/// set encoders and a fixed-order, zero-padded flat vector for baseline
/// policies.
pub trait Environment {
    /// Starts a fresh episode. Equal seeds give equal episodes.
    fn reset(&mut self, seed: u64);

    /// Advances one step. Rejects non-finite actions and stepping a finished
    /// episode.
    fn step(&mut self, action: [f64; 2]) -> Result<StepResult>;

    fn is_done(&self) -> bool;

    /// Set-valued observation of the current state.
    fn object_set(&self) -> ObjectSet;

    /// Flat fixed-length observation of the current state.
    fn flat_observation(&self) -> Vec<f64>;

    /// Length of [`Environment::flat_observation`], constant per instance.
    fn flat_dim(&self) -> usize;
}
