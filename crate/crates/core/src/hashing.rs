//! Stable, platform-independent hashing used for every persisted or
//! reproducibility-relevant decision (shingles, sampling, sharding).

use xxhash_rust::xxh3::{xxh3_128_with_seed, xxh3_64_with_seed};

#[inline]
pub fn hash64(bytes: &[u8], seed: u64) -> u64 {
    xxh3_64_with_seed(bytes, seed)
}

#[inline]
pub fn hash128(bytes: &[u8], seed: u64) -> u128 {
    xxh3_128_with_seed(bytes, seed)
}

/// MurmurHash3 finalizer. A bijection on `u64`.
#[inline]
pub fn fmix64(mut k: u64) -> u64 {
    k ^= k >> 33;
    k = k.wrapping_mul(0xff51_afd7_ed55_8ccd);
    k ^= k >> 33;
    k = k.wrapping_mul(0xc4ce_b9fe_1a85_ec53);
    k ^= k >> 33;
    k
}

/// Next value of a splitmix64 stream; used to derive per-index seeds.
#[inline]
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Maps a hash onto [0, 1) using its top 53 bits.
#[inline]
pub fn unit_interval(h: u64) -> f64 {
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Order-sensitive digest of a sequence of strings.
#[derive(Debug, Clone)]
pub struct SeqDigest {
    state: u64,
}

impl Default for SeqDigest {
    fn default() -> Self {
        SeqDigest { state: 0x6a09_e667_f3bc_c908 }
    }
}

impl SeqDigest {
    pub fn push(&mut self, item: &str) {
        self.state = hash64(item.as_bytes(), fmix64(self.state));
    }

    pub fn finish(&self) -> u64 {
        self.state
    }
}
