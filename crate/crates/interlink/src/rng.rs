//! Seeding conventions.
//!
//! All randomness in this crate flows through `ChaCha12` generators seeded
//! from 64-bit values. Derived streams (per realization, per stage) use
//! [`mix_seed`], a SplitMix64 finalizer over master seed and stream index,
//! so independent workers never share a stream.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

pub fn rng_from_seed(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

/// Derives a child seed from `(master, stream)`.
pub fn mix_seed(master: u64, stream: u64) -> u64 {
    let mut z = master
        .wrapping_add(stream.wrapping_mul(0x9e37_79b9_7f4a_7c15))
        .wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
