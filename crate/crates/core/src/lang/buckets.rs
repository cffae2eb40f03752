//! Head / middle / tail perplexity tertiles.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modelfile;

/// Key used for the pooled, language-independent boundaries.
pub const GLOBAL_KEY: &str = "*";

const MAGIC: &str = "curate-ppl-buckets";
const VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bucket {
    Head,
    Middle,
    Tail,
}

impl Bucket {
    pub fn as_str(self) -> &'static str {
        match self {
            Bucket::Head => "head",
            Bucket::Middle => "middle",
            Bucket::Tail => "tail",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerplexityBuckets {
    /// Language (or [`GLOBAL_KEY`]) to (b1, b2).
    pub bounds: BTreeMap<String, (f64, f64)>,
}

fn tertiles(scores: &[f64]) -> (f64, f64) {
    let mut s = scores.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    (s[n.div_ceil(3) - 1], s[(2 * n).div_ceil(3) - 1])
}

impl PerplexityBuckets {
    /// Fits per-language boundaries, plus pooled boundaries under
    /// [`GLOBAL_KEY`] when `global` is set.
    pub fn fit(scores: &BTreeMap<String, Vec<f64>>, global: bool) -> Result<Self> {
        let mut bounds = BTreeMap::new();
        for (lang, s) in scores {
            let s: Vec<f64> = s.iter().copied().filter(|v| !v.is_nan()).collect();
            if s.len() < 3 {
                return Err(Error::InsufficientCalibration(lang.clone()));
            }
            bounds.insert(lang.clone(), tertiles(&s));
        }
        if global {
            let pooled: Vec<f64> = scores.values().flatten().copied().filter(|v| !v.is_nan()).collect();
            if pooled.len() < 3 {
                return Err(Error::InsufficientCalibration(GLOBAL_KEY.into()));
            }
            bounds.insert(GLOBAL_KEY.into(), tertiles(&pooled));
        }
        if bounds.is_empty() {
            return Err(Error::InsufficientCalibration(GLOBAL_KEY.into()));
        }
        Ok(PerplexityBuckets { bounds })
    }

    /// Falls back to the pooled boundaries for languages without their own.
    pub fn bucket(&self, ppl: f64, lang: &str) -> Result<Bucket> {
        let (b1, b2) = self
            .bounds
            .get(lang)
            .or_else(|| self.bounds.get(GLOBAL_KEY))
            .ok_or_else(|| Error::UnknownLanguage(lang.to_string()))?;
        Ok(if ppl <= *b1 {
            Bucket::Head
        } else if ppl <= *b2 {
            Bucket::Middle
        } else {
            Bucket::Tail
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        modelfile::save(path, MAGIC, VERSION, self)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let b: PerplexityBuckets = modelfile::load(path, MAGIC, VERSION)?;
        if b.bounds.values().any(|(b1, b2)| b1 > b2) {
            return Err(Error::model(path, "bucket boundaries out of order"));
        }
        Ok(b)
    }
}

pub fn fit_buckets(scores: &BTreeMap<String, Vec<f64>>) -> Result<PerplexityBuckets> {
    PerplexityBuckets::fit(scores, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn one(lang: &str, s: Vec<f64>) -> BTreeMap<String, Vec<f64>> {
        BTreeMap::from([(lang.to_string(), s)])
    }

    #[test]
    fn one_to_nine() {
        let b = fit_buckets(&one("en", (1..=9).map(f64::from).collect())).unwrap();
        assert_eq!(b.bounds["en"], (3.0, 6.0));
        assert_eq!(b.bucket(2.0, "en").unwrap(), Bucket::Head);
        assert_eq!(b.bucket(6.0, "en").unwrap(), Bucket::Middle);
        assert_eq!(b.bucket(6.5, "en").unwrap(), Bucket::Tail);
        assert!(matches!(b.bucket(1.0, "zh"), Err(Error::UnknownLanguage(_))));
    }

    #[test]
    fn ties_bucket_down() {
        let b = fit_buckets(&one("en", vec![4.0; 10])).unwrap();
        assert_eq!(b.bucket(4.0, "en").unwrap(), Bucket::Head);
    }

    #[test]
    fn too_few_scores() {
        assert!(matches!(fit_buckets(&one("en", vec![1.0, 2.0])), Err(Error::InsufficientCalibration(_))));
    }

    #[test]
    fn global_fallback() {
        let mut s = one("en", vec![1.0, 2.0, 3.0]);
        s.insert("zh".into(), vec![10.0, 20.0, 30.0]);
        let b = PerplexityBuckets::fit(&s, true).unwrap();
        assert_eq!(b.bounds[GLOBAL_KEY], (2.0, 10.0));
        assert_eq!(b.bucket(5.0, "fr").unwrap(), Bucket::Middle);
    }

    proptest! {
        #[test]
        fn monotone_and_third_dropped(mut s in prop::collection::vec(0.0f64..1000.0, 3..300)) {
            let b = fit_buckets(&one("x", s.clone())).unwrap();
            let (b1, b2) = b.bounds["x"];
            prop_assert!(b1 <= b2);
            s.sort_by(f64::total_cmp);
            let buckets: Vec<Bucket> = s.iter().map(|&v| b.bucket(v, "x").unwrap()).collect();
            prop_assert!(buckets.windows(2).all(|w| w[0] <= w[1]));
            let n = s.len();
            let tail = buckets.iter().filter(|&&k| k == Bucket::Tail).count();
            prop_assert!(tail <= n - (2 * n).div_ceil(3));
        }
    }
}
