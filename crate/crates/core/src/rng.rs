//! Seeded, platform-independent randomness.
//!
//! Every stochastic routine takes an explicit generator; nothing here holds
//! global state.

use rand::SeedableRng;

pub use rand_xoshiro::SplitMix64;

/// SplitMix64 generator fully determined by `seed`.
pub fn seeded(seed: u64) -> SplitMix64 {
    SplitMix64::seed_from_u64(seed)
}

/// Independent stream number `stream` derived from `seed`.
pub fn substream(seed: u64, stream: u64) -> SplitMix64 {
    seeded(seed ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}
