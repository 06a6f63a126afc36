//! Deterministic seed derivation.
//!
//! Child seeds are derived by keyed hashing of `(master seed, role, index)`,
//! so adding or reordering parallel workers never changes any individual
//! random stream.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use sha2::{Digest, Sha256};

fn digest(master: u64, role: &str, index: u64) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    h.update([role.len() as u8]);
    h.update(role.as_bytes());
    h.update(index.to_le_bytes());
    h.finalize().into()
}

/// Derives a child seed for `(master, role, index)`.
pub fn derive_seed(master: u64, role: &str, index: u64) -> u64 {
    let d = digest(master, role, index);
    u64::from_le_bytes(d[..8].try_into().unwrap())
}

/// A ChaCha generator keyed by `(master, role, index)`.
pub fn rng_from(master: u64, role: &str, index: u64) -> ChaCha12Rng {
    ChaCha12Rng::from_seed(digest(master, role, index))
}
