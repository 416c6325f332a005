//! Seeded randomness.
//!
//! Every random draw in the crate comes from [`SeededRng`], which is
//! ChaCha with 8 rounds as implemented by `rand_chacha` 0.9. Its output
//! stream is fixed for a given 64-bit seed regardless of platform or
//! endianness, so a seed recorded in a model or plan file reproduces the
//! run elsewhere.
//!
//! Derived seeds are the first eight bytes (little endian) of the SHA-256
//! digest of the ASCII string
//! `"topicstab-seed-v1|<base>|<role>|<k>|<size>|<replicate>"`, with `-`
//! in place of an absent size.
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// What a derived seed is used for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SeedRole {
    Spanning,
    SampleDraw,
    SampleTrain,
}

impl SeedRole {
    pub fn as_str(self) -> &'static str {
        match self {
            SeedRole::Spanning => "spanning",
            SeedRole::SampleDraw => "sample-draw",
            SeedRole::SampleTrain => "sample-train",
        }
    }
}

pub fn derive_seed(
    base: u64,
    role: SeedRole,
    k: usize,
    size: Option<usize>,
    replicate: usize,
) -> u64 {
    let size = size.map_or_else(|| "-".to_string(), |s| s.to_string());
    let key = format!(
        "topicstab-seed-v1|{base}|{}|{k}|{size}|{replicate}",
        role.as_str()
    );
    let digest = Sha256::digest(key.as_bytes());
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}
