//! TF-IDF weighting over the hashed unigram/bigram space.

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::learned::{featurize_counts, HashedFeatureVector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TfidfModel {
    pub dim: u32,
    pub n_docs: u64,
    #[serde(with = "crate::serde_util::sorted_map")]
    pub df: FxHashMap<u32, u32>,
}

impl TfidfModel {
    pub fn fit<'a>(texts: impl IntoIterator<Item = &'a str>, dim: u32) -> Self {
        let mut df: FxHashMap<u32, u32> = FxHashMap::default();
        let mut n_docs = 0;
        for t in texts {
            n_docs += 1;
            for &(i, _) in &featurize_counts(t, dim).entries {
                *df.entry(i).or_default() += 1;
            }
        }
        TfidfModel { dim, n_docs, df }
    }

    /// ln((1 + N) / (1 + df)) + 1, always positive.
    pub fn idf(&self, index: u32) -> f64 {
        let df = self.df.get(&index).copied().unwrap_or(0) as f64;
        ((1.0 + self.n_docs as f64) / (1.0 + df)).ln() + 1.0
    }

    /// L2-normalized TF-IDF vector; empty text gives the zero vector.
    pub fn transform(&self, text: &str) -> HashedFeatureVector {
        let mut v = featurize_counts(text, self.dim);
        for e in &mut v.entries {
            e.1 = (e.1 as f64 * self.idf(e.0)) as f32;
        }
        v.normalize();
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn idf_is_positive_and_rare_terms_weigh_more() {
        let m = TfidfModel::fit(["apple pie", "apple tart", "cherry pie"], 1 << 16);
        assert_eq!(m.n_docs, 3);
        let apple = featurize_counts("apple", 1 << 16).entries[0].0;
        let unseen = featurize_counts("zebra", 1 << 16).entries[0].0;
        assert!((m.idf(apple) - ((4.0f64 / 3.0).ln() + 1.0)).abs() < 1e-12);
        assert!(m.idf(unseen) > m.idf(apple));
        let v = m.transform("apple pie");
        assert!((v.norm() - 1.0).abs() < 1e-6);
        assert!(m.transform("").is_empty());
    }
}
