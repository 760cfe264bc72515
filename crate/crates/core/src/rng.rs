//! Counter-based random streams.
//!
//! Every trial draws from `stream(master, index)`: a ChaCha8 keystream keyed by
//! the master seed and selected by the trial index. Streams for different
//! indices never overlap, so a batch produces the same numbers no matter how
//! the trials are scheduled across workers.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Identifies one random stream: a batch-level master seed plus a per-trial index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamSeed {
    pub master: u64,
    pub index: u64,
}

impl StreamSeed {
    pub fn new(master: u64, index: u64) -> Self {
        Self { master, index }
    }

    /// Seed for the `attempt`-th redraw of the same trial.
    ///
    /// Attempt 0 is the seed itself.
    pub fn redraw(self, attempt: u64) -> Self {
        if attempt == 0 {
            return self;
        }
        Self {
            master: mix(self.master, attempt),
            index: self.index,
        }
    }
}

/// A master seed for an independent batch labelled `tag` under `master`.
pub fn mix(master: u64, tag: u64) -> u64 {
    // splitmix64 finaliser over (master, tag)
    let mut z = master.wrapping_add(tag.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl From<u64> for StreamSeed {
    fn from(master: u64) -> Self {
        Self { master, index: 0 }
    }
}

/// The generator carried inside a [`crate::systems::State`].
#[derive(Debug, Clone)]
pub struct TrialRng {
    inner: ChaCha8Rng,
}

impl TrialRng {
    pub fn new(seed: StreamSeed) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed.master);
        inner.set_stream(seed.index);
        Self { inner }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 bits of resolution.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `(0, 1]`; safe to raise to negative powers.
    #[inline]
    pub fn uniform_open0(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}
