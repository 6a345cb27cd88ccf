//! Deterministic seed derivation.
//!
//! All randomness flows from one master seed. Per-module streams are derived
//! as `master XOR hash(tag) XOR index`, mixed through SplitMix64 so that
//! neighboring indices do not produce correlated ChaCha streams.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// FNV-1a on the tag bytes; stable across platforms.
fn fnv1a(tag: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in tag.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x1000_0000_01b3);
    }
    h
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Derive the stream seed for `(tag, index)` under `master`.
pub fn derive(master: u64, tag: &str, index: u64) -> u64 {
    splitmix64(master ^ fnv1a(tag) ^ index)
}

/// Seeded generator for `(tag, index)` under `master`.
pub fn rng(master: u64, tag: &str, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(master, tag, index))
}
