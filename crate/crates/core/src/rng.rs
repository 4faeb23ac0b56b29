//! Seeded random streams.
//!
//! Every random draw in the crate comes from [`ChaCha8Rng`]. A run is
//! identified by a 64-bit seed plus a stream number; ChaCha's 64-bit stream
//! parameter keeps the streams of different runs (and of the different
//! consumers inside one run) disjoint, so results never depend on how work
//! is scheduled across threads.

use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng;

/// What a stream is used for inside a single run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Lane {
    /// Transitions drawn from the MDP.
    Samples = 0,
    /// Algorithm-internal choices (batch indices, epoch output index).
    Algorithm = 1,
    /// Held-out test samples used by metrics.
    Evaluation = 2,
    /// Environment construction.
    Environment = 3,
    /// Initial state of a trajectory.
    Start = 4,
}

/// Returns the generator for `(seed, index, lane)`.
pub fn stream(seed: u64, index: u64, lane: Lane) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((index << 3) | lane as u64);
    rng
}
