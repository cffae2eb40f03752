//! Character n-gram language identification.

use std::collections::BTreeMap;
use std::path::Path;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hashing::hash64;
use crate::modelfile;

pub const MAX_ORDER: usize = 4;
/// Inputs shorter than this (in characters) are reported as "und".
pub const MIN_TEXT_CHARS: usize = 20;
/// Minimum characters of training text per language.
pub const MIN_TRAIN_CHARS: usize = 1000;

const MAGIC: &str = "curate-langid";
const VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LangIdConfig {
    /// Additive smoothing per bucket.
    pub alpha: f64,
    pub bucket_bits: u32,
}

impl Default for LangIdConfig {
    fn default() -> Self {
        LangIdConfig { alpha: 0.5, bucket_bits: 20 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
struct OrderTable {
    /// (bucket, count), sorted by bucket in files.
    #[serde(with = "crate::serde_util::sorted_map")]
    counts: FxHashMap<u32, u32>,
    total: u64,
}

/// Per-language additive-smoothed distributions over hashed character
/// n-grams, one distribution per order 1..=4.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharNgramProfile {
    pub config: LangIdConfig,
    pub languages: Vec<String>,
    tables: Vec<Vec<OrderTable>>,
}

/// Calls `f(order, bucket)` for every character n-gram of every
/// whitespace-delimited token, each token padded with one space per side.
fn for_each_gram(text: &str, bucket_bits: u32, mut f: impl FnMut(usize, u32)) {
    let mask = (1u64 << bucket_bits) - 1;
    let mut bounds: Vec<usize> = Vec::with_capacity(64);
    let mut padded = String::with_capacity(64);
    for token in text.split_whitespace() {
        padded.clear();
        padded.push(' ');
        for c in token.chars() {
            padded.extend(c.to_lowercase());
        }
        padded.push(' ');
        bounds.clear();
        bounds.extend(padded.char_indices().map(|(i, _)| i));
        bounds.push(padded.len());
        let nchars = bounds.len() - 1;
        for n in 1..=MAX_ORDER {
            for start in 0..nchars.saturating_sub(n - 1) {
                let gram = &padded.as_bytes()[bounds[start]..bounds[start + n]];
                if n == 1 && gram == b" " {
                    continue;
                }
                f(n, (hash64(gram, n as u64) & mask) as u32);
            }
        }
    }
}

impl CharNgramProfile {
    pub fn train<'a, I>(samples: I, config: LangIdConfig) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        if config.alpha <= 0.0 || !(8..=30).contains(&config.bucket_bits) {
            return Err(Error::Invalid("langid alpha must be positive and bucket_bits in 8..=30".into()));
        }
        let mut per_lang: BTreeMap<String, (Vec<OrderTable>, usize)> = BTreeMap::new();
        for (lang, text) in samples {
            let (tables, chars) =
                per_lang.entry(lang.to_string()).or_insert_with(|| (vec![OrderTable::default(); MAX_ORDER], 0));
            *chars += text.chars().count();
            for_each_gram(text, config.bucket_bits, |n, b| {
                let t = &mut tables[n - 1];
                *t.counts.entry(b).or_default() += 1;
                t.total += 1;
            });
        }
        if per_lang.len() < 2 {
            return Err(Error::InsufficientData(format!(
                "language identification needs at least 2 languages, got {}",
                per_lang.len()
            )));
        }
        for (lang, (_, chars)) in &per_lang {
            if *chars < MIN_TRAIN_CHARS {
                return Err(Error::InsufficientData(format!(
                    "language {lang:?} has {chars} characters of training text, need {MIN_TRAIN_CHARS}"
                )));
            }
        }
        let (languages, tables) = per_lang.into_iter().map(|(l, (t, _))| (l, t)).unzip();
        Ok(CharNgramProfile { config, languages, tables })
    }

    fn buckets(&self) -> f64 {
        (1u64 << self.config.bucket_bits) as f64
    }

    /// Smoothed probability of `bucket` at `order` for language index `li`.
    pub fn prob(&self, li: usize, order: usize, bucket: u32) -> f64 {
        let t = &self.tables[li][order - 1];
        let c = t.counts.get(&bucket).copied().unwrap_or(0) as f64;
        (c + self.config.alpha) / (t.total as f64 + self.config.alpha * self.buckets())
    }

    /// Total probability mass of one order's distribution, summed over all
    /// buckets.
    pub fn total_mass(&self, li: usize, order: usize) -> f64 {
        let t = &self.tables[li][order - 1];
        let denom = t.total as f64 + self.config.alpha * self.buckets();
        let seen: f64 = t.counts.values().map(|&c| c as f64 + self.config.alpha).sum();
        let unseen = (self.buckets() - t.counts.len() as f64) * self.config.alpha;
        (seen + unseen) / denom
    }

    /// Mean log-probability of the text's n-grams under each language.
    pub fn mean_log_probs(&self, text: &str) -> Vec<f64> {
        let k = self.languages.len();
        let mut sums = vec![0.0; k];
        let mut n_grams = 0usize;
        let denoms: Vec<[f64; MAX_ORDER]> = self
            .tables
            .iter()
            .map(|ts| std::array::from_fn(|o| (ts[o].total as f64 + self.config.alpha * self.buckets()).ln()))
            .collect();
        for_each_gram(text, self.config.bucket_bits, |n, b| {
            n_grams += 1;
            for li in 0..k {
                let c = self.tables[li][n - 1].counts.get(&b).copied().unwrap_or(0) as f64;
                sums[li] += (c + self.config.alpha).ln() - denoms[li][n - 1];
            }
        });
        if n_grams > 0 {
            sums.iter_mut().for_each(|s| *s /= n_grams as f64);
        }
        sums
    }

    /// Argmax language under length-normalized log-likelihood. Confidence is
    /// the winner's share of a softmax over the per-language scores. Texts
    /// under 20 characters give ("und", 0).
    pub fn identify(&self, text: &str) -> (String, f64) {
        if text.chars().filter(|c| !c.is_whitespace()).take(MIN_TEXT_CHARS).count() < MIN_TEXT_CHARS {
            return ("und".to_string(), 0.0);
        }
        let scores = self.mean_log_probs(text);
        let mut best = 0;
        for (i, &s) in scores.iter().enumerate() {
            if s > scores[best] {
                best = i;
            }
        }
        let z: f64 = scores.iter().map(|s| (s - scores[best]).exp()).sum();
        (self.languages[best].clone(), 1.0 / z)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        modelfile::save(path, MAGIC, VERSION, self)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let p: CharNgramProfile = modelfile::load(path, MAGIC, VERSION)?;
        if p.tables.len() != p.languages.len() || p.tables.iter().any(|t| t.len() != MAX_ORDER) {
            return Err(Error::model(path, "table shape does not match language list"));
        }
        Ok(p)
    }
}

pub fn identify_language(text: &str, profile: &CharNgramProfile) -> (String, f64) {
    profile.identify(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    const EN: &str = "The committee met on Tuesday to discuss the budget for the coming year. \
Members agreed that the library should remain open during the summer and that the \
gardens would be restored. The chairman thanked the volunteers who had organised the \
spring fair and reminded everyone that the next meeting would take place in the town \
hall. A report on the state of the roads was presented and several residents asked \
questions about the new traffic lights near the school. ";
    const ZH: &str = "委员会星期二开会讨论了明年的预算。成员们一致同意图书馆在夏季继续开放，\
花园也将得到修复。主席感谢组织春季集市的志愿者，并提醒大家下一次会议将在市政厅举行。\
会上介绍了道路状况的报告，几位居民就学校附近的新红绿灯提出了问题。";

    fn profile() -> CharNgramProfile {
        let en = EN.repeat(4);
        let zh = ZH.repeat(12);
        CharNgramProfile::train([("en", en.as_str()), ("zh", zh.as_str())], LangIdConfig::default()).unwrap()
    }

    #[test]
    fn classifies_and_guards_length() {
        let p = profile();
        let (lang, conf) = p.identify("the quick brown fox jumps over the garden wall");
        assert_eq!(lang, "en");
        assert!(conf > 0.9, "{conf}");
        assert_eq!(p.identify("今天天气很好，我们去公园散步吧，然后一起吃午饭和晚饭。").0, "zh");
        assert_eq!(p.identify("hello"), ("und".to_string(), 0.0));
    }

    #[test]
    fn duplication_keeps_argmax() {
        let p = profile();
        let t = "a report on the roads near the school";
        let once = p.mean_log_probs(t);
        let twice = p.mean_log_probs(&format!("{t} {t}"));
        for (a, b) in once.iter().zip(&twice) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn distributions_sum_to_one() {
        let p = profile();
        for li in 0..2 {
            for order in 1..=MAX_ORDER {
                assert!((p.total_mass(li, order) - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn identical_labels_give_half() {
        let en = EN.repeat(4);
        let p = CharNgramProfile::train([("a", en.as_str()), ("b", en.as_str())], LangIdConfig::default()).unwrap();
        let (_, conf) = p.identify("the quick brown fox jumps over the garden wall");
        assert!((conf - 0.5).abs() < 1e-9);
    }

    #[test]
    fn insufficient_data() {
        let en = EN.repeat(4);
        assert!(matches!(
            CharNgramProfile::train([("en", en.as_str())], LangIdConfig::default()),
            Err(Error::InsufficientData(_))
        ));
        assert!(matches!(
            CharNgramProfile::train([("en", en.as_str()), ("zh", "短文本")], LangIdConfig::default()),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn save_load_round_trip() {
        let p = profile();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("lid.json");
        p.save(&path).unwrap();
        assert_eq!(CharNgramProfile::load(&path).unwrap(), p);
    }
}
