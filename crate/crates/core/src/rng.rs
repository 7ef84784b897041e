//! Seed handling.
//!
//! Every random draw in the crate comes from a ChaCha8 generator keyed by a
//! 64-bit seed plus a stream number, so independent sub-computations (one
//! partitioning, one trial, one grid cell) never share a stream.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator for sub-stream `stream` of `seed`.
pub fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Mixes `parts` into `seed` (splitmix64 finalizer per part). Used to key
/// sweeps by (grid cell, trial).
pub fn derive(seed: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(splitmix(seed), |acc, &p| splitmix(acc ^ splitmix(p)))
}

fn splitmix(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
