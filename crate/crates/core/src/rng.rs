//! Seeded random streams.
//!
//! Every random draw in the crate comes from ChaCha8 (`rand_chacha`),
//! seeded with `SeedableRng::seed_from_u64(seed)` and split into
//! independent streams with `set_stream`. A stream is identified by the
//! run seed plus a 64-bit stream id, so parallel workers get the same
//! numbers regardless of scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

pub fn stream(seed: u64, id: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Stream for a two-level index such as (grid point, trial).
pub fn stream2(seed: u64, outer: u32, inner: u32) -> StreamRng {
    stream(seed, (u64::from(outer) << 32) | u64::from(inner))
}
