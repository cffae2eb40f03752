//! Whole-document exact dedup on normalized text.

use rayon::prelude::*;
use rustc_hash::FxHashMap;

use crate::corpus::dedup_normalize;
use crate::hashing::hash128;

pub fn exact_key(text: &str) -> u128 {
    hash128(dedup_normalize(text).as_bytes(), 0)
}

/// Keep mask over `docs` (id, text): among documents with identical
/// normalized text only the smallest id survives.
pub fn exact_duplicates(docs: &[(&str, &str)]) -> Vec<bool> {
    let keys: Vec<u128> = docs.par_iter().map(|d| exact_key(d.1)).collect();
    let mut best: FxHashMap<u128, usize> = FxHashMap::default();
    for (i, &k) in keys.iter().enumerate() {
        best.entry(k)
            .and_modify(|b| {
                if docs[i].0 < docs[*b].0 {
                    *b = i;
                }
            })
            .or_insert(i);
    }
    keys.iter().enumerate().map(|(i, k)| best[k] == i).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keeps_smallest_id() {
        let docs = [("b", "Hello  World"), ("a", "hello world"), ("c", "hello there"), ("d", "hello world")];
        assert_eq!(exact_duplicates(&docs), vec![false, true, true, false]);
    }
}
