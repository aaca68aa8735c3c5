use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Deterministic, platform-independent RNG keyed by (seed, stream).
///
/// Every stochastic routine in the toolkit derives its randomness from one of
/// these streams, so a (config, seed) pair fully determines all outputs.
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha12Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&stream.to_le_bytes());
    key[16..24].copy_from_slice(&0x9e37_79b9_7f4a_7c15u64.to_le_bytes());
    ChaCha12Rng::from_seed(key)
}

/// Stream tags so that independent uses of the same seed never collide.
pub mod stream {
    pub const TOPOLOGY: u64 = 1;
    pub const BOUNDARY: u64 = 2;
    pub const DYNAMICS_MARKS: u64 = 3;
    pub const TREE_SAMPLER: u64 = 4;
    pub const PERCOLATION: u64 = 5;
    pub const BLOCK: u64 = 6;
    pub const EXPERIMENT: u64 = 7;
}
