//! Seed derivation for reproducible, order-independent generation.
//!
//! Every stage of every document draws from its own generator, seeded from
//! `(master_seed, index, stage_tag)`. Parallel runs therefore produce the same
//! bytes as serial runs.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used throughout the crate.
pub type SeededRng = ChaCha8Rng;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(FNV_OFFSET, |h, b| (h ^ u64::from(*b)).wrapping_mul(FNV_PRIME))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stable 64-bit hash of `(master_seed, index, stage_tag)`.
pub fn derive_seed(master_seed: u64, index: u64, stage_tag: &str) -> u64 {
    let tagged = splitmix64(master_seed ^ fnv1a(stage_tag.as_bytes()));
    splitmix64(tagged ^ splitmix64(index))
}

/// Hash an arbitrary string key under a master seed.
pub fn hash_key(master_seed: u64, key: &str) -> u64 {
    splitmix64(master_seed ^ fnv1a(key.as_bytes()))
}

pub fn stage_rng(master_seed: u64, index: u64, stage_tag: &str) -> SeededRng {
    SeededRng::seed_from_u64(derive_seed(master_seed, index, stage_tag))
}

pub fn rng_from_seed(seed: u64) -> SeededRng {
    SeededRng::seed_from_u64(seed)
}
