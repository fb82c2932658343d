//! Experiment harness: configs, batch runs, combinatorics, and reporting.
//!
//! The binary exposes five verbs (`train`, `compare`, `combinatorics`,
//! `greedy`, `plot`); everything they do lives here so tests and other tools
//! can drive experiments in-process.

pub mod combinatorics;
pub mod config;
pub mod curves;
pub mod error;
pub mod experiment;
pub mod greedy;
pub mod plot;

pub use combinatorics::{factorial, state_space_sizes, ExactRatio, SpaceSizes};
pub use config::{EncoderConfig, ExperimentConfig, ReprKind, TaskId};
pub use curves::{
    epochs_to_threshold, load_curve, moving_average, parse_curve_csv, ParsedCurve,
    THRESHOLD_WINDOW,
};
pub use error::{HarnessError, Result};
pub use experiment::{
    compare, improvement_flag, resolve_output_dir, run_experiment, ComparisonReport, RunOutcome,
    IMPROVEMENT_WINDOW,
};
pub use greedy::{estimate_greedy_return, GreedyEstimate};
pub use plot::emit_plot;
