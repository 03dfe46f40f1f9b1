//! Named, seedable random streams.
//!
//! Every consumer (matrix sampling, PSS sampling, noise, diagnostics) draws
//! from its own stream, addressed by `(seed, kind, index)`. Streams with
//! different addresses are statistically independent and a given address
//! always yields the same sequence, regardless of which thread asks for it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// The consumer a stream belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StreamKind {
    Matrix,
    Pss,
    Noise,
    Oracle,
    /// Diagnostic checks; the payload separates checks from each other.
    Diagnostic(u32),
}

impl StreamKind {
    fn tag(self) -> u64 {
        match self {
            StreamKind::Matrix => 1,
            StreamKind::Pss => 2,
            StreamKind::Noise => 3,
            StreamKind::Oracle => 4,
            StreamKind::Diagnostic(id) => 0x100 + id as u64,
        }
    }
}

/// Root of a family of streams.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Streams {
    seed: u64,
}

impl Streams {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Opens the stream at `(kind, index)`.
    pub fn stream(&self, kind: StreamKind, index: u64) -> StreamRng {
        let mut state = self.seed ^ 0x5354_4f44_4152_5321;
        let mut words = [0u64; 4];
        let inputs = [kind.tag(), index, 0xa076_1d64_78bd_642f, 0xe703_7ed1_a0b4_28db];
        for (word, input) in words.iter_mut().zip(inputs) {
            state = state.wrapping_add(input);
            *word = splitmix64(&mut state);
        }
        let mut bytes = [0u8; 32];
        for (chunk, word) in bytes.chunks_exact_mut(8).zip(words) {
            chunk.copy_from_slice(&word.to_le_bytes());
        }
        ChaCha8Rng::from_seed(bytes)
    }

    /// A child family, e.g. one per replication in a batch.
    pub fn child(&self, index: u64) -> Streams {
        let mut state = self.seed ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
        Streams::new(splitmix64(&mut state))
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
