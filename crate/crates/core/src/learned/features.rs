//! Hashed bag of word unigrams and bigrams.

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::corpus::dedup_normalize;
use crate::hashing::hash64;
use crate::heuristics::segment::for_each_word;

pub const DEFAULT_DIM: u32 = 1 << 20;

const UNIGRAM_SEED: u64 = 0x51ed_270b_27b4_2c4d;
const BIGRAM_SEED: u64 = 0x9e37_79b9_7f4a_7c15;

/// Sparse vector with strictly increasing indices.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct HashedFeatureVector {
    pub dim: u32,
    pub entries: Vec<(u32, f32)>,
}

impl HashedFeatureVector {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|&(_, v)| (v as f64) * (v as f64)).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &HashedFeatureVector) -> f64 {
        sparse_dot(&self.entries, &other.entries)
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            for e in &mut self.entries {
                e.1 = (e.1 as f64 / n) as f32;
            }
        }
    }
}

pub fn sparse_dot(a: &[(u32, f32)], b: &[(u32, f32)]) -> f64 {
    let (mut i, mut j, mut s) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                s += a[i].1 as f64 * b[j].1 as f64;
                i += 1;
                j += 1;
            }
        }
    }
    s
}

/// Calls `f(hash)` for each unigram and bigram of the dedup-normalized text.
fn for_each_feature(text: &str, mut f: impl FnMut(u64)) {
    let normalized = dedup_normalize(text);
    let mut prev: Option<&str> = None;
    let mut buf: Vec<u8> = Vec::with_capacity(64);
    for_each_word(&normalized, |w| {
        f(hash64(w.as_bytes(), UNIGRAM_SEED));
        if let Some(p) = prev {
            buf.clear();
            buf.extend_from_slice(p.as_bytes());
            buf.push(b' ');
            buf.extend_from_slice(w.as_bytes());
            f(hash64(&buf, BIGRAM_SEED));
        }
        prev = Some(w);
    });
}

fn collect(map: FxHashMap<u32, f64>, dim: u32) -> HashedFeatureVector {
    let mut entries: Vec<(u32, f32)> = map.into_iter().filter(|&(_, v)| v != 0.0).map(|(i, v)| (i, v as f32)).collect();
    entries.sort_unstable_by_key(|e| e.0);
    HashedFeatureVector { dim, entries }
}

/// Signed feature hashing, L2-normalized. `dim` must be a power of two.
pub fn featurize(text: &str, dim: u32) -> HashedFeatureVector {
    debug_assert!(dim.is_power_of_two());
    let mask = dim as u64 - 1;
    let mut map: FxHashMap<u32, f64> = FxHashMap::default();
    for_each_feature(text, |h| {
        let sign = if h >> 63 == 0 { 1.0 } else { -1.0 };
        *map.entry((h & mask) as u32).or_default() += sign;
    });
    let mut v = collect(map, dim);
    v.normalize();
    v
}

/// Unsigned raw term counts in the same hashed space.
pub fn featurize_counts(text: &str, dim: u32) -> HashedFeatureVector {
    debug_assert!(dim.is_power_of_two());
    let mask = dim as u64 - 1;
    let mut map: FxHashMap<u32, f64> = FxHashMap::default();
    for_each_feature(text, |h| *map.entry((h & mask) as u32).or_default() += 1.0);
    collect(map, dim)
}

/// Cosine of two texts' feature vectors, clipped below at 0.
pub fn clipped_cosine(a: &HashedFeatureVector, b: &HashedFeatureVector) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    (a.dot(b) / (a.norm() * b.norm())).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_normalized() {
        let a = featurize("The cat sat on the mat", DEFAULT_DIM);
        let b = featurize("the  CAT sat on the mat", DEFAULT_DIM);
        assert_eq!(a, b);
        assert!((a.norm() - 1.0).abs() < 1e-6);
        assert!(a.entries.windows(2).all(|w| w[0].0 < w[1].0));
        assert!(a.entries.iter().all(|e| e.0 < DEFAULT_DIM));
    }

    #[test]
    fn empty_is_zero() {
        assert!(featurize("", DEFAULT_DIM).is_empty());
        assert!(featurize(" \n ", 1024).is_empty());
    }

    #[test]
    fn counts_are_unsigned() {
        let v = featurize_counts("a a b", 1 << 16);
        // a, b, "a a", "a b"
        let total: f32 = v.entries.iter().map(|e| e.1).sum();
        assert_eq!(total, 5.0);
        assert!(v.entries.iter().all(|e| e.1 > 0.0));
    }

    #[test]
    fn cosine_bounds() {
        let a = featurize("red green blue", DEFAULT_DIM);
        let b = featurize("one two three", DEFAULT_DIM);
        assert!((clipped_cosine(&a, &a) - 1.0).abs() < 1e-6);
        assert_eq!(clipped_cosine(&a, &b), 0.0);
        assert_eq!(clipped_cosine(&a, &HashedFeatureVector::default()), 0.0);
    }
}
