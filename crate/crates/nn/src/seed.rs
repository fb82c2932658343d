//! Deterministic random streams and seed derivation.
//!
//! Experiments key everything off a single base seed. Sub-seeds for distinct
//! roles (environment draws, policy noise, initialization, shuffling) are
//! derived by hashing the role label into the base seed, so adding a new
//! consumer of randomness never perturbs the streams of existing ones.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Deterministic generator for a given seed.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives a sub-seed from a base seed and a role label.
///
/// FNV-1a over the label folded into the base seed, then finished with a
/// splitmix64-style mix so nearby bases map to unrelated outputs.
pub fn derive_seed(base: u64, role: &str) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325 ^ base;
    for byte in role.as_bytes() {
        h ^= u64::from(*byte);
        h = h.wrapping_mul(0x100000001b3);
    }
    mix(h)
}

/// Derives a per-index seed, e.g. one seed per episode.
pub fn derive_indexed_seed(base: u64, role: &str, index: u64) -> u64 {
    mix(derive_seed(base, role) ^ mix(index.wrapping_add(0x9e3779b97f4a7c15)))
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Standard normal draw via Box-Muller.
///
/// The uniform for the log is mapped into `(0, 1]` so the transform never sees
/// zero.
pub fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    let u1 = ((rng.gen::<u64>() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64);
    let u2 = ((rng.gen::<u64>() >> 11) as f64) * (1.0 / (1u64 << 53) as f64);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}
