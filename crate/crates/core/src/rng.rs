//! Counter-based random streams.
//!
//! Every trial draws from a ChaCha8 stream keyed by the run seed and selected
//! by the trial index, so trial `i` sees the same numbers no matter which
//! thread runs it or in what order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TrialRng = ChaCha8Rng;

/// Stream for trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Stream for a named sub-task of a trial. The tag keeps independent
/// consumers (sampling a lattice, routing on it) from sharing numbers.
pub fn substream(seed: u64, trial: u64, tag: u64) -> TrialRng {
    let mixed = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15).rotate_left(17);
    let mut rng = ChaCha8Rng::seed_from_u64(mixed);
    rng.set_stream(trial);
    rng
}
