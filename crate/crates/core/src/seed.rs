//! Seed derivation for reproducible, order-independent generation.
//!
//! Every per-track generator is seeded from `(corpus seed, track index)` so a
//! track's randomness does not depend on which thread produced it or on how
//! many tracks came before it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finaliser.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed for item `index` of the run seeded by `seed`.
pub fn derive(seed: u64, index: u64) -> u64 {
    mix(mix(seed) ^ index.wrapping_mul(0xD6E8_FEB8_6659_FD93))
}

/// Purpose-tagged child streams, so the same track seed can drive several
/// independent decisions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    CoinFlip = 1,
    Noise = 2,
    Pairing = 3,
    Host = 4,
}

pub fn rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}
