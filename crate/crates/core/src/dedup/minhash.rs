//! Word shingles and MinHash signatures.

use std::sync::OnceLock;

use crate::corpus::dedup_normalize;
use crate::hashing::{fmix64, hash64, splitmix64};
use crate::heuristics::segment::for_each_word;

pub const NUM_PERM: usize = 128;
pub const SHINGLE_WORDS: usize = 5;

const PERM_SEED: u64 = 0x2545_f491_4f6c_dd1d;
const WORD_SEED: u64 = 0x5851_f42d_4c95_7f2d;

pub type Signature = [u64; NUM_PERM];

/// Per-permutation seeds; element i of a signature depends only on seed i.
pub fn perm_seeds() -> &'static [u64; NUM_PERM] {
    static SEEDS: OnceLock<[u64; NUM_PERM]> = OnceLock::new();
    SEEDS.get_or_init(|| {
        let mut state = PERM_SEED;
        std::array::from_fn(|_| splitmix64(&mut state))
    })
}

/// Sorted, deduplicated hashes of the word `n`-grams of the
/// dedup-normalized text. Empty when the text has fewer than `n` words.
pub fn shingles_n(text: &str, n: usize) -> Vec<u64> {
    let normalized = dedup_normalize(text);
    let mut words: Vec<u64> = Vec::new();
    for_each_word(&normalized, |w| words.push(hash64(w.as_bytes(), WORD_SEED)));
    let mut out: Vec<u64> =
        words.windows(n.max(1)).map(|g| g.iter().fold(n as u64, |h, &w| fmix64(h.rotate_left(23) ^ w))).collect();
    out.sort_unstable();
    out.dedup();
    out
}

pub fn shingles(text: &str) -> Vec<u64> {
    shingles_n(text, SHINGLE_WORDS)
}

/// Minimum of `fmix64(x ^ seed_i)` over the set, per permutation. `None` for
/// an empty set.
pub fn minhash_signature(shingles: &[u64]) -> Option<Box<Signature>> {
    if shingles.is_empty() {
        return None;
    }
    let seeds = perm_seeds();
    let mut sig = Box::new([u64::MAX; NUM_PERM]);
    for &x in shingles {
        for (m, &s) in sig.iter_mut().zip(seeds.iter()) {
            let h = fmix64(x ^ s);
            if h < *m {
                *m = h;
            }
        }
    }
    Some(sig)
}

pub fn signature_of(text: &str) -> Option<Box<Signature>> {
    minhash_signature(&shingles(text))
}

pub fn matching_positions(a: &Signature, b: &Signature) -> usize {
    a.iter().zip(b.iter()).filter(|(x, y)| x == y).count()
}

/// Exact Jaccard similarity of two sorted, deduplicated sets.
pub fn jaccard(a: &[u64], b: &[u64]) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    let (mut i, mut j, mut inter) = (0, 0, 0usize);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                inter += 1;
                i += 1;
                j += 1;
            }
        }
    }
    inter as f64 / (a.len() + b.len() - inter) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shingle_sets() {
        assert!(shingles("one two three four").is_empty());
        assert_eq!(shingles("one two three four five").len(), 1);
        assert_eq!(shingles("a b c d e a b c d e").len(), 5);
        assert_eq!(shingles("A  b C d E"), shingles("a b c d e"));
        assert_ne!(shingles("a b c d e"), shingles("e d c b a"));
    }

    #[test]
    fn identical_docs_identical_signatures() {
        let t = "the quick brown fox jumps over the lazy dog again";
        assert_eq!(signature_of(t), signature_of(t));
        assert!(signature_of("too short").is_none());
    }

    #[test]
    fn disjoint_sets_rarely_match() {
        let a = signature_of(&(0..300).map(|i| format!("a{i}")).collect::<Vec<_>>().join(" ")).unwrap();
        let b = signature_of(&(0..300).map(|i| format!("b{i}")).collect::<Vec<_>>().join(" ")).unwrap();
        assert_eq!(matching_positions(&a, &b), 0);
    }

    #[test]
    fn jaccard_values() {
        assert_eq!(jaccard(&[1, 2, 3], &[2, 3, 4]), 0.5);
        assert_eq!(jaccard(&[], &[]), 1.0);
        assert_eq!(jaccard(&[1], &[]), 0.0);
    }
}
