//! Benchmark environments with set-valued state.
//!
//! Two task families share one [`Environment`] interface. The scavenger tasks
//! put a point agent on a bounded plane with food (and optionally poison)
//! particles; the convoy task escorts three members across the unit square
//! while attackers spawn and despawn. In all of them the world state is
//! naturally a *set* of interchangeable objects, and every environment offers
//! the same state through two lenses: [`ObjectSet`](setpool_encoder::ObjectSet)
//! for permutation-invariant encoders and a zero-padded flat vector for
//! fixed-arity baselines.
//!
//! Episodes are deterministic functions of `(seed, action sequence)`, which
//! the trainers rely on for reproducible curves.

mod convoy;
mod error;
mod scavenger;
mod trajectory;
mod types;

pub use convoy::{
    ConvoyEnv, ATTACKER_SPEED, ATTACK_RADIUS, BLOCK_RADIUS, BLOCK_REWARD, CONVOY_SPEED,
    DEFENDER_STEP, GOAL_X, HARD_STEP_CAP, MAX_ATTACKERS, MEMBER_COUNT, MEMBER_LOST_REWARD,
    SPAWN_POINTS, SPAWN_PROB,
};
pub use error::{EnvError, Result};
pub use scavenger::{
    greedy_policy, ScavengerEnv, ScavengerTask, CAPTURE_RADIUS, FOOD_REWARD, MAX_STEP,
    POISON_REWARD, STEP_LIMIT, STEP_REWARD, WORLD_HALF,
};
pub use trajectory::TrajectoryWriter;
pub use types::{Environment, StepInfo, StepResult, TerminalCause};
