//! Seed derivation.
//!
//! Every random draw comes from a ChaCha8 stream addressed by
//! `(master seed, replication index, purpose)`. Replications therefore do not
//! depend on scheduling, and the event, mark and regime streams of one
//! replication never overlap.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// What a stream is used for inside one replication.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Events = 0,
    Marks = 1,
    Regime = 2,
    Auxiliary = 3,
}

const STREAMS_PER_INDEX: u64 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamSeed {
    pub master: u64,
    pub index: u64,
}

impl StreamSeed {
    pub fn new(master: u64, index: u64) -> Self {
        Self { master, index }
    }

    pub fn rng(&self, stream: Stream) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master);
        rng.set_stream(
            self.index
                .wrapping_mul(STREAMS_PER_INDEX)
                .wrapping_add(stream as u64),
        );
        rng
    }

    /// Seed for rung `rung` of a ladder experiment, replication `index`.
    pub fn for_rung(master: u64, rung: usize, index: usize) -> Self {
        Self::new(master, ((rung as u64) << 32) | index as u64)
    }
}
