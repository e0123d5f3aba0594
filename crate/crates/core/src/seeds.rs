//! Deterministic seed derivation. Every random stream in a simulation is
//! keyed by the master seed plus a path of integers (replication, purpose,
//! user, ...), so streams never depend on scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream purposes used by the engine.
pub mod purpose {
    pub const DEPLOYMENT: u64 = 1;
    pub const TRAJECTORY: u64 = 2;
    pub const INITIAL_CHARGE: u64 = 3;
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive(master: u64, path: &[u64]) -> u64 {
    path.iter().fold(splitmix64(master), |acc, &p| {
        splitmix64(acc ^ splitmix64(p))
    })
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
