//! Counter-based random substreams.
//!
//! Every random draw in the engine comes from a ChaCha8 generator keyed by a
//! tuple of counters, so results never depend on scheduling or worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Stream tags keep generators for different purposes disjoint.
pub mod stream {
    pub const CHAIN: u64 = 1;
    pub const SIMULATION: u64 = 2;
    pub const STUDY: u64 = 3;
    pub const DATASET: u64 = 4;
    pub const SETUP: u64 = 5;
}

/// Generator for the tuple `(seed, tag, major, minor)`.
pub fn substream(seed: u64, tag: u64, major: u64, minor: u64) -> SimRng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&tag.to_le_bytes());
    key[16..24].copy_from_slice(&major.to_le_bytes());
    key[24..].copy_from_slice(&minor.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}
