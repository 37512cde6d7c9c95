//! Seed derivation.
//!
//! Every random decision in the crate draws from a [`ChaCha8Rng`] seeded by a
//! 64-bit value. Child seeds are derived from a parent seed and an index with
//! a SplitMix64 finalizer, which is a bijection of its input: for a fixed
//! parent, distinct indices always give distinct child seeds.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed number `index` of `parent`.
pub fn split(parent: u64, index: u64) -> u64 {
    mix64(mix64(parent).wrapping_add(GOLDEN_GAMMA.wrapping_mul(index.wrapping_add(1))))
}

pub fn stream(seed: u64) -> Stream {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Named sub-streams used inside one replication.
pub(crate) mod tag {
    pub const GRAPH: u64 = 0;
    pub const SPLIT: u64 = 1;
    pub const CONFORMAL: u64 = 2;
    pub const NAIVE: u64 = 3;
    pub const CROSS_VALIDATED: u64 = 4;

    pub const REFERENCE: u64 = 10;
    pub const FIT: u64 = 11;
    pub const VALIDATION: u64 = 12;
}
