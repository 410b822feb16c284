//! Keyed random streams.
//!
//! A stream is identified by `(seed, purpose, index)`; the three words form
//! the ChaCha key, so streams never overlap and replicate `i` draws the same
//! numbers no matter which thread runs it or in what order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// What a stream is used for. Distinct purposes give independent streams
/// under the same seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Design = 1,
    Noise = 2,
    Permutation = 3,
    MonteCarlo = 4,
    Lanczos = 5,
}

pub fn stream(seed: u64, purpose: Purpose, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&(purpose as u64).to_le_bytes());
    key[16..24].copy_from_slice(&index.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// Packs a two-level replicate key, e.g. `(n, rep)`, into one index.
pub fn replicate_index(outer: u64, inner: u64) -> u64 {
    (outer << 32) ^ inner
}
