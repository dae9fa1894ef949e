//! Seed derivation for reproducible runs.
//!
//! Every random choice in the crate flows from a ChaCha8 generator
//! (`rand_chacha`), a counter-based stream cipher with identical output on
//! every platform. Independent stages and scenes get independent
//! generators by mixing a base seed with a stream index through
//! splitmix64, so adding parallelism or reordering work never changes
//! what any stage draws.

use rand_chacha::ChaCha8Rng;
use rand_chacha::rand_core::SeedableRng;

/// The generator used for all randomness in this crate.
pub type PortableRng = ChaCha8Rng;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Derives an independent child seed from a seed and a stream index.
pub fn mix(seed: u64, stream: u64) -> u64 {
    splitmix64(seed ^ splitmix64(stream.wrapping_add(0x51d2_cc58_a63b_1ab4)))
}

/// A generator for stream `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> PortableRng {
    PortableRng::seed_from_u64(mix(seed, stream))
}
