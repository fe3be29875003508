//! Seeded random streams.
//!
//! Every stochastic component takes an explicit `u64` seed and draws from a
//! ChaCha8 stream, which is portable across platforms. Sub-seeds for stages
//! and per-level fits are derived by hashing the master seed with a tag.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derive an independent seed from `master` and a textual tag.
pub fn derive_seed(master: u64, tag: &str) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(master.to_le_bytes());
    hasher.update(tag.as_bytes());
    let digest = hasher.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_seeds_differ_by_tag_and_are_stable() {
        let a = derive_seed(7, "lsirm/47");
        assert_eq!(a, derive_seed(7, "lsirm/47"));
        assert_ne!(a, derive_seed(7, "lsirm/48"));
        assert_ne!(a, derive_seed(8, "lsirm/47"));
    }
}
