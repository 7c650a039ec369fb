//! Counter-based randomness: every draw is a pure function of
//! `(seed, counter)`, so any partition of the work across threads reproduces
//! the same stream.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// 32-bit words reserved for each shot. A shot may consume at most
/// `WORDS_PER_SHOT / 2` `u64` draws.
pub const WORDS_PER_SHOT: u128 = 8;

/// Independent child seed for sub-run `index` of a seeded experiment.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index.wrapping_add(1));
    rng.next_u64()
}

/// Random stream positioned at the window of one counter value.
pub struct CounterRng {
    inner: ChaCha8Rng,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Reposition to the start of counter `k`'s window.
    pub fn seek(&mut self, k: u64) {
        self.inner.set_word_pos(k as u128 * WORDS_PER_SHOT);
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}
