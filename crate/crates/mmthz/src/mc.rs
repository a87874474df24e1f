//! Deterministic chunked Monte-Carlo execution.
//!
//! Trials are partitioned into fixed-size chunks; chunk `i` draws from an
//! independent ChaCha stream derived from `(seed, i)`. Results are collected
//! in chunk order, so the aggregate is bit-identical for any number of
//! worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub(crate) const CHUNK_TRIALS: u64 = 256;

/// Run `trials` trials in fixed chunks. `per_chunk(rng, n)` must execute
/// exactly `n` trials with the given stream and return its partial result.
pub(crate) fn run_chunked<T, F>(trials: u64, seed: u64, per_chunk: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, u64) -> T + Sync,
{
    let n_chunks = trials.div_ceil(CHUNK_TRIALS);
    (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk + 1);
            let lo = chunk * CHUNK_TRIALS;
            let hi = ((chunk + 1) * CHUNK_TRIALS).min(trials);
            per_chunk(&mut rng, hi - lo)
        })
        .collect()
}
