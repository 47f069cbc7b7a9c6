//! Deterministic seed derivation.
//!
//! Every random stream in the toolkit is seeded through these mixers so that a
//! single master seed reproduces a whole benchmark bit for bit, while distinct
//! consumers (series synthesis, each optimizer run, ...) get decorrelated
//! streams.

/// SplitMix64 output function; a full-period mixer over u64.
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// FNV-1a over a byte string; stable across platforms and runs.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xCBF2_9CE4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

/// Derive a child seed from a parent seed and a sequence of tags.
pub fn derive(seed: u64, tags: &[u64]) -> u64 {
    let mut s = splitmix64(seed);
    for &t in tags {
        s = splitmix64(s ^ splitmix64(t));
    }
    s
}

/// Derive a child seed keyed by a name and an index.
pub fn derive_named(seed: u64, name: &str, index: u64) -> u64 {
    derive(seed, &[fnv1a(name.as_bytes()), index])
}
