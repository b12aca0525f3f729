//! Seeded random streams.
//!
//! All randomness in the crate flows through counter-based ChaCha generators
//! keyed by `(seed, stream)`. Distinct subsystems draw from distinct streams,
//! so running per-class selection or sweep cells in parallel cannot perturb
//! the numbers any other consumer sees.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream ids for the fixed consumers. Per-class selection streams start at
/// [`STREAM_CLASS_BASE`] and are offset by the class id.
pub const STREAM_DATASET: u64 = 1;
pub const STREAM_SPLIT: u64 = 2;
pub const STREAM_INIT: u64 = 3;
pub const STREAM_SHUFFLE: u64 = 4;
pub const STREAM_MASK: u64 = 5;
pub const STREAM_VAL_SHUFFLE: u64 = 6;
pub const STREAM_DISCRETE_INIT: u64 = 7;
pub const STREAM_DISCRETE_SHUFFLE: u64 = 8;
pub const STREAM_CLASS_BASE: u64 = 1_000;

/// Generator for `stream` under `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Per-class selection stream keyed by `(seed, class_id)`.
pub fn class_rng(seed: u64, class_id: u32) -> ChaCha8Rng {
    stream_rng(seed, STREAM_CLASS_BASE + u64::from(class_id))
}
