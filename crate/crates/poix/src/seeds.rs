//! Deterministic seed derivation for parallel jobs.
//!
//! Every stochastic component (synthetic data, factor initialization,
//! BPR sampling, k-means) draws from a ChaCha8 stream seeded by folding the
//! master seed with a stable label such as `"bprmf/k5-dtv1-oAll-sAll/f10"`.
//! The fold is a fixed FNV-1a, not `DefaultHasher`, so seeds — and therefore
//! all outputs — survive std hasher changes across Rust releases.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// FNV-1a over arbitrary bytes; stable across platforms and releases.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h = FNV_OFFSET;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

/// Derives a child seed from a master seed and a textual job label.
pub fn derive(master: u64, label: &str) -> u64 {
    let mut h = fnv1a(label.as_bytes());
    for b in master.to_le_bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

/// A ChaCha8 RNG for the job identified by `label` under `master`.
pub fn rng(master: u64, label: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(master, label))
}
