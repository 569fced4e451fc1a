//! Seeded random streams.
//!
//! Every randomized routine in the crate draws from ChaCha8 (via
//! `rand_chacha`), seeded with `seed_from_u64`. The generator is specified
//! bit-for-bit, so instance files, annealing runs and sample sets are
//! identical across platforms for the same seed. Independent sub-streams
//! (annealing restarts, per-instance work) use ChaCha's 64-bit stream id.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn substream(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Fisher-Yates shuffle drawing `u64` indices so the permutation does not
/// depend on the platform's pointer width.
pub fn shuffle<T, R: Rng + ?Sized>(items: &mut [T], rng: &mut R) {
    for i in (1..items.len()).rev() {
        let j = rng.random_range(0..=i as u64) as usize;
        items.swap(i, j);
    }
}
