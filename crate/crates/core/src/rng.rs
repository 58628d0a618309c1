//! Seeded random streams.
//!
//! Every consumer of randomness owns a [`ChaCha8Rng`] seeded from a master
//! seed and a stream index: `seed = master + index * STREAM_STRIDE`
//! (wrapping). Workers that run concurrently take distinct indices, so their
//! draws never depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub const STREAM_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

/// Well-known stream indices.
pub mod stream {
    pub const INIT: u64 = 0;
    pub const SAMPLER: u64 = 1;
    pub const EPISODES: u64 = 2;
    pub const FINE_TUNE: u64 = 3;
    pub const MULTITASK: u64 = 4;
    /// Repetition `r` of a sweep uses `REPETITION_BASE + r`.
    pub const REPETITION_BASE: u64 = 1000;
}

pub fn stream_seed(master: u64, index: u64) -> u64 {
    master.wrapping_add(index.wrapping_mul(STREAM_STRIDE))
}

pub fn stream_rng(master: u64, index: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(stream_seed(master, index))
}
