//! Counter-based random streams.
//!
//! A stream is addressed by `(seed, worker, round)`: the seed keys a ChaCha8
//! generator, the worker selects the ChaCha stream and the round selects a
//! fixed window of the keystream. Any stream can be materialized in O(1)
//! without touching the others, which keeps Monte Carlo output independent
//! of how rounds are scheduled onto threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// 32-bit words of keystream reserved per round.
const WORDS_PER_ROUND: u128 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StreamId {
    pub seed: u64,
    pub worker: u64,
    pub round: u64,
}

impl StreamId {
    pub fn new(seed: u64, worker: u64, round: u64) -> Self {
        Self { seed, worker, round }
    }

    /// Generator positioned at the start of this stream's window. A round
    /// may draw at most 32 `f64`s before running into the next window.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.worker);
        rng.set_word_pos(self.round as u128 * WORDS_PER_ROUND);
        rng
    }
}
