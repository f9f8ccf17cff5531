//! Deterministic seed splitting and trial fan-out.
//!
//! Every stochastic entry point derives one ChaCha stream per trial from a
//! master seed, so a result depends only on `(seed, trial index)` and never
//! on how trials are scheduled across threads. Aggregation happens on the
//! index-ordered output vector, which keeps floating-point folds identical
//! for any `threads` setting (and for builds without the `parallel` feature).

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Counter-based seed derivation (splitmix64 finalizer over `master ^ index`).
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-trial generator: the master seed selects the key, `stream` the
/// independent ChaCha stream.
pub fn trial_rng(master: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(stream);
    rng
}

/// Maps a trial kernel over `0..trials`, in parallel when available.
///
/// `threads == 0` uses all available cores, `1` forces sequential execution,
/// any other value runs on a dedicated pool of that size. Output order is
/// always trial order.
pub fn map_trials<T, F>(trials: u64, threads: usize, kernel: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync,
{
    #[cfg(feature = "parallel")]
    {
        match threads {
            1 => (0..trials).map(kernel).collect(),
            0 => (0..trials).into_par_iter().map(kernel).collect(),
            n => rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .expect("thread pool")
                .install(|| (0..trials).into_par_iter().map(&kernel).collect()),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        (0..trials).map(kernel).collect()
    }
}
