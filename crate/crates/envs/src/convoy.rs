//! Convoy-escort defense on the unit square.
//!
//! Three convoy members cross from x=0 to x=1 at constant speed while
//! attackers spawn at random times on the boundary and home in on the nearest
//! member at twice the convoy speed. The agent steers a defender that
//! deactivates any attacker it gets close to. The attacker population varies
//! within an episode from zero up to [`MAX_ATTACKERS`], which is what makes
//! this task a variable-cardinality stress test for state representations.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use setpool_encoder::ObjectSet;
use setpool_nn::{seeded_rng, Mat};

use crate::error::{EnvError, Result};
use crate::types::{Environment, StepInfo, StepResult, TerminalCause};

/// Convoy forward speed per step.
pub const CONVOY_SPEED: f64 = 0.005;
/// Attacker speed per step (twice the convoy speed).
pub const ATTACKER_SPEED: f64 = 2.0 * CONVOY_SPEED;
/// Defender maximum displacement per step.
pub const DEFENDER_STEP: f64 = 0.02;
/// Distance at which the defender neutralizes an attacker.
pub const BLOCK_RADIUS: f64 = 0.06;
/// Distance at which an attacker destroys a convoy member.
pub const ATTACK_RADIUS: f64 = 0.04;
/// Per-point spawn probability per step.
pub const SPAWN_PROB: f64 = 0.02;
/// Maximum simultaneous attackers.
pub const MAX_ATTACKERS: usize = 6;
/// Number of convoy members.
pub const MEMBER_COUNT: usize = 3;
/// X coordinate at which members are safe.
pub const GOAL_X: f64 = 1.0;
/// Reward per blocked attacker.
pub const BLOCK_REWARD: f64 = 0.1;
/// Reward per destroyed convoy member.
pub const MEMBER_LOST_REWARD: f64 = -1.0;
/// Safety cap on episode length; members resolve by construction well before
/// this (the convoy crosses in 1/CONVOY_SPEED = 200 steps).
pub const HARD_STEP_CAP: u32 = 400;

/// Boundary spawn points, equally spaced along the perimeter.
pub const SPAWN_POINTS: [[f64; 2]; 8] = [
    [0.0, 0.0],
    [0.5, 0.0],
    [1.0, 0.0],
    [1.0, 0.5],
    [1.0, 1.0],
    [0.5, 1.0],
    [0.0, 1.0],
    [0.0, 0.5],
];

const MEMBER_START_YS: [f64; MEMBER_COUNT] = [0.4, 0.5, 0.6];
const DEFENDER_START: [f64; 2] = [0.1, 0.5];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum MemberStatus {
    Active,
    Safe,
    Destroyed,
}

#[derive(Debug, Clone, Copy)]
struct Member {
    pos: [f64; 2],
    status: MemberStatus,
}

/// Convoy episode state and dynamics.
#[derive(Debug, Clone)]
pub struct ConvoyEnv {
    members: [Member; MEMBER_COUNT],
    /// Fixed slots; a living attacker keeps its slot for its whole life, so
    /// baseline observations stay positionally stable.
    attackers: [Option<[f64; 2]>; MAX_ATTACKERS],
    defender: [f64; 2],
    heading: f64,
    time: u32,
    done: bool,
    rng: ChaCha8Rng,
}

impl ConvoyEnv {
    pub fn new(seed: u64) -> Self {
        let mut env = Self {
            members: [Member { pos: [0.0, 0.0], status: MemberStatus::Active }; MEMBER_COUNT],
            attackers: [None; MAX_ATTACKERS],
            defender: DEFENDER_START,
            heading: 0.0,
            time: 0,
            done: false,
            rng: seeded_rng(0),
        };
        env.reset(seed);
        env
    }

    pub fn defender(&self) -> [f64; 2] {
        self.defender
    }

    pub fn heading(&self) -> f64 {
        self.heading
    }

    pub fn time(&self) -> u32 {
        self.time
    }

    /// Positions of members still en route.
    pub fn active_members(&self) -> Vec<[f64; 2]> {
        self.members
            .iter()
            .filter(|m| m.status == MemberStatus::Active)
            .map(|m| m.pos)
            .collect()
    }

    /// Positions of living attackers, in slot order.
    pub fn active_attackers(&self) -> Vec<[f64; 2]> {
        self.attackers.iter().flatten().copied().collect()
    }

    pub fn active_attacker_count(&self) -> usize {
        self.attackers.iter().flatten().count()
    }

    pub fn members_safe(&self) -> usize {
        self.members.iter().filter(|m| m.status == MemberStatus::Safe).count()
    }

    pub fn members_destroyed(&self) -> usize {
        self.members.iter().filter(|m| m.status == MemberStatus::Destroyed).count()
    }

    /// Encoder observation: active members and active attackers as two object
    /// classes (position vectors), defender pose as the ego block.
    pub fn to_object_set(&self) -> ObjectSet {
        ObjectSet::new(
            vec![positions_matrix(&self.active_members()), positions_matrix(&self.active_attackers())],
            vec![self.defender[0], self.defender[1], self.heading],
        )
    }

    /// Baseline observation: `(x, y, status)` per member slot, `(x, y,
    /// status)` per attacker slot up to `max_attackers`, then the defender
    /// pose. Dead or absent entities read as all-zero slots.
    pub fn to_flat_baseline(&self, max_attackers: usize) -> Result<Vec<f64>> {
        let occupied = self
            .attackers
            .iter()
            .rposition(Option::is_some)
            .map_or(0, |i| i + 1);
        if occupied > max_attackers {
            return Err(EnvError::BaselineOverflow { count: occupied, max: max_attackers });
        }
        let mut out = Vec::with_capacity(3 * (MEMBER_COUNT + max_attackers) + 3);
        for member in &self.members {
            if member.status == MemberStatus::Active {
                out.extend([member.pos[0], member.pos[1], 1.0]);
            } else {
                out.extend([0.0, 0.0, 0.0]);
            }
        }
        for slot in 0..max_attackers {
            match self.attackers.get(slot).copied().flatten() {
                Some(pos) => out.extend([pos[0], pos[1], 1.0]),
                None => out.extend([0.0, 0.0, 0.0]),
            }
        }
        out.extend([self.defender[0], self.defender[1], self.heading]);
        Ok(out)
    }
}

impl Environment for ConvoyEnv {
    fn reset(&mut self, seed: u64) {
        for (member, y) in self.members.iter_mut().zip(MEMBER_START_YS) {
            *member = Member { pos: [0.0, y], status: MemberStatus::Active };
        }
        self.attackers = [None; MAX_ATTACKERS];
        self.defender = DEFENDER_START;
        self.heading = 0.0;
        self.time = 0;
        self.done = false;
        self.rng = seeded_rng(seed);
    }

    fn step(&mut self, action: [f64; 2]) -> Result<StepResult> {
        if self.done {
            return Err(EnvError::EpisodeOver);
        }
        if !action[0].is_finite() || !action[1].is_finite() {
            return Err(EnvError::NonFiniteAction);
        }

        // Defender moves first, so a block this step uses where the defender
        // chose to be, not where it was.
        let delta = clip_norm(action, DEFENDER_STEP);
        if delta != [0.0, 0.0] {
            self.heading = delta[1].atan2(delta[0]);
        }
        self.defender[0] += delta[0];
        self.defender[1] += delta[1];

        for member in &mut self.members {
            if member.status == MemberStatus::Active {
                member.pos[0] += CONVOY_SPEED;
            }
        }

        // Attackers home in on the nearest en-route member (ties toward the
        // lowest member index), landing exactly when closer than one step.
        let targets: Vec<[f64; 2]> = self.active_members();
        if !targets.is_empty() {
            for attacker in self.attackers.iter_mut().flatten() {
                let target = targets
                    .iter()
                    .min_by(|a, b| {
                        dist(**a, *attacker)
                            .partial_cmp(&dist(**b, *attacker))
                            .expect("finite distances")
                    })
                    .expect("non-empty targets");
                let d = dist(*target, *attacker);
                if d <= ATTACKER_SPEED {
                    *attacker = *target;
                } else {
                    attacker[0] += (target[0] - attacker[0]) / d * ATTACKER_SPEED;
                    attacker[1] += (target[1] - attacker[1]) / d * ATTACKER_SPEED;
                }
            }
        }

        // Spawns: one uniform draw per point every step, so the random stream
        // position depends only on elapsed time, never on world state.
        for point in SPAWN_POINTS {
            let roll: f64 = self.rng.gen();
            if roll < SPAWN_PROB && self.active_attacker_count() < MAX_ATTACKERS {
                let slot = self
                    .attackers
                    .iter()
                    .position(Option::is_none)
                    .expect("a slot is free below the cap");
                self.attackers[slot] = Some(point);
            }
        }

        let mut info = StepInfo::default();

        // Blocks resolve before attacks: a defender in range saves the member
        // even if the attacker is also in striking distance.
        for slot in 0..MAX_ATTACKERS {
            if let Some(pos) = self.attackers[slot] {
                if dist(pos, self.defender) <= BLOCK_RADIUS {
                    self.attackers[slot] = None;
                    info.blocked += 1;
                }
            }
        }

        for slot in 0..MAX_ATTACKERS {
            if let Some(pos) = self.attackers[slot] {
                let victim = self
                    .members
                    .iter_mut()
                    .filter(|m| m.status == MemberStatus::Active)
                    .min_by(|a, b| {
                        dist(a.pos, pos).partial_cmp(&dist(b.pos, pos)).expect("finite distances")
                    });
                if let Some(member) = victim {
                    if dist(member.pos, pos) <= ATTACK_RADIUS {
                        member.status = MemberStatus::Destroyed;
                        self.attackers[slot] = None;
                        info.members_lost += 1;
                    }
                }
            }
        }

        for member in &mut self.members {
            if member.status == MemberStatus::Active && member.pos[0] >= GOAL_X {
                member.status = MemberStatus::Safe;
            }
        }

        self.time += 1;
        let resolved = self.members.iter().all(|m| m.status != MemberStatus::Active);
        if resolved {
            info.terminal_cause = Some(TerminalCause::ConvoyResolved);
        } else if self.time >= HARD_STEP_CAP {
            info.terminal_cause = Some(TerminalCause::Timeout);
        }
        self.done = info.terminal_cause.is_some();

        let reward =
            BLOCK_REWARD * f64::from(info.blocked) + MEMBER_LOST_REWARD * f64::from(info.members_lost);
        Ok(StepResult { reward, done: self.done, info })
    }

    fn is_done(&self) -> bool {
        self.done
    }

    fn object_set(&self) -> ObjectSet {
        self.to_object_set()
    }

    fn flat_observation(&self) -> Vec<f64> {
        self.to_flat_baseline(MAX_ATTACKERS).expect("own capacity always fits")
    }

    fn flat_dim(&self) -> usize {
        3 * (MEMBER_COUNT + MAX_ATTACKERS) + 3
    }
}

fn positions_matrix(positions: &[[f64; 2]]) -> Mat {
    if positions.is_empty() {
        return Mat::zeros(0, 2);
    }
    Mat::from_rows(positions).expect("position rows share dimension 2")
}

fn clip_norm(v: [f64; 2], max: f64) -> [f64; 2] {
    let n = (v[0] * v[0] + v[1] * v[1]).sqrt();
    if n > max {
        [v[0] / n * max, v[1] / n * max]
    } else {
        v
    }
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    (dx * dx + dy * dy).sqrt()
}
