//! Counter-derived random streams, so batch results do not depend on thread
//! scheduling or worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream families; each batch job draws from its own.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    RirScene = 1,
    Pair = 2,
    Remix = 3,
}

/// Independent generator for item `index` of `domain` under a master seed.
pub fn stream_rng(seed: u64, domain: Domain, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&(domain as u64).to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(index);
    rng
}
