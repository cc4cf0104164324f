//! Counter-keyed random streams.
//!
//! Every consumer derives its generator from `(seed, stream)` so that, for
//! instance, bootstrap resample `i` draws the same indices no matter which
//! worker evaluates it or in what order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Stream reserved for the dataset-split permutation.
pub const SPLIT_STREAM: u64 = 0x5350_4c49_5400_0000;

/// Generator for stream `stream` under `seed`.
pub fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Fills `out` with indices drawn uniformly from `0..n` with replacement.
pub fn draw_indices<R: Rng>(rng: &mut R, n: usize, out: &mut Vec<usize>) {
    out.clear();
    out.extend((0..n).map(|_| rng.random_range(0..n)));
}
