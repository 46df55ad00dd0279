//! Seeded random streams.
//!
//! Every consumer owns its own [`Stream`]; independent streams are derived
//! from a master seed and a path of integer labels so that parallel and
//! sequential runs see identical randomness.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

pub fn stream(seed: u64) -> Stream {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derive a child seed from a parent seed and a label path.
pub fn derive_seed(seed: u64, labels: &[u64]) -> u64 {
    labels
        .iter()
        .fold(splitmix64(seed ^ 0x5bd1_e995_9e37_79b9), |acc, &l| {
            splitmix64(acc ^ splitmix64(l.wrapping_add(0x632b_e59b_d9b4_e019)))
        })
}

pub fn derive(seed: u64, labels: &[u64]) -> Stream {
    stream(derive_seed(seed, labels))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
