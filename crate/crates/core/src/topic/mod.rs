//! Naive-Bayes topic labeling and hash-based down-sampling by label.

use std::collections::BTreeMap;
use std::path::Path;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::corpus::dedup_normalize;
use crate::error::{Error, Result};
use crate::hashing::{hash64, unit_interval};
use crate::heuristics::segment::for_each_word;
use crate::modelfile;

pub const LABELS: [&str; 6] = ["ads", "fiction", "forum", "knowledge", "news", "other"];
pub const DEFAULT_DIM: u32 = 1 << 18;
pub const FALLBACK_LABEL: &str = "other";

const MAGIC: &str = "curate-topic";
const VERSION: u32 = 1;
const FEATURE_SEED: u64 = 0x0074_6f70_6963;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicModel {
    pub dim: u32,
    pub alpha: f64,
    /// Sorted.
    pub labels: Vec<String>,
    pub log_priors: Vec<f64>,
    /// Per label: token counts by hashed word.
    counts: Vec<TokenCounts>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
struct TokenCounts {
    #[serde(with = "crate::serde_util::sorted_map")]
    counts: FxHashMap<u32, u32>,
    total: u64,
}

fn features(text: &str, dim: u32, mut f: impl FnMut(u32)) {
    let mask = dim as u64 - 1;
    let normalized = dedup_normalize(text);
    for_each_word(&normalized, |w| f((hash64(w.as_bytes(), FEATURE_SEED) & mask) as u32));
}

impl TopicModel {
    /// Multinomial naive Bayes with additive smoothing `alpha`; every label
    /// in `labels` needs at least one example.
    pub fn train<'a, I>(examples: I, labels: &[&str], dim: u32, alpha: f64) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        if !dim.is_power_of_two() || alpha <= 0.0 {
            return Err(Error::Invalid("topic dim must be a power of two and alpha positive".into()));
        }
        let mut sorted: Vec<String> = labels.iter().map(|s| s.to_string()).collect();
        sorted.sort();
        sorted.dedup();
        let index: BTreeMap<&str, usize> = sorted.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
        let mut counts = vec![TokenCounts::default(); sorted.len()];
        let mut docs = vec![0u64; sorted.len()];
        for (label, text) in examples {
            let li =
                *index.get(label).ok_or_else(|| Error::Invalid(format!("label {label:?} is not in the label set")))?;
            docs[li] += 1;
            let c = &mut counts[li];
            features(text, dim, |b| {
                *c.counts.entry(b).or_default() += 1;
                c.total += 1;
            });
        }
        if let Some(li) = docs.iter().position(|&d| d == 0) {
            return Err(Error::MissingClass(sorted[li].clone()));
        }
        let n: u64 = docs.iter().sum();
        Ok(TopicModel {
            dim,
            alpha,
            log_priors: docs.iter().map(|&d| (d as f64 / n as f64).ln()).collect(),
            labels: sorted,
            counts,
        })
    }

    pub fn log_likelihood(&self, li: usize, bucket: u32) -> f64 {
        let c = &self.counts[li];
        let k = c.counts.get(&bucket).copied().unwrap_or(0) as f64;
        ((k + self.alpha) / (c.total as f64 + self.alpha * self.dim as f64)).ln()
    }

    /// Total probability mass of one label's word distribution.
    pub fn total_mass(&self, li: usize) -> f64 {
        let c = &self.counts[li];
        let denom = c.total as f64 + self.alpha * self.dim as f64;
        let seen: f64 = c.counts.values().map(|&k| k as f64 + self.alpha).sum();
        (seen + (self.dim as f64 - c.counts.len() as f64) * self.alpha) / denom
    }

    /// Argmax label with the posterior over all labels. Ties go to the
    /// lexicographically first label; text without words gives the fallback
    /// label with a uniform posterior.
    pub fn classify(&self, text: &str) -> (String, BTreeMap<String, f64>) {
        let k = self.labels.len();
        let mut scores = self.log_priors.clone();
        let mut any = false;
        features(text, self.dim, |b| {
            any = true;
            for (li, s) in scores.iter_mut().enumerate() {
                *s += self.log_likelihood(li, b);
            }
        });
        if !any {
            let uniform = self.labels.iter().map(|l| (l.clone(), 1.0 / k as f64)).collect();
            let label = if self.labels.iter().any(|l| l == FALLBACK_LABEL) {
                FALLBACK_LABEL.to_string()
            } else {
                self.labels[0].clone()
            };
            return (label, uniform);
        }
        let mut best = 0;
        for i in 1..k {
            if scores[i] > scores[best] {
                best = i;
            }
        }
        let z: f64 = scores.iter().map(|s| (s - scores[best]).exp()).sum();
        let posterior =
            self.labels.iter().zip(&scores).map(|(l, s)| (l.clone(), (s - scores[best]).exp() / z)).collect();
        (self.labels[best].clone(), posterior)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        modelfile::save(path, MAGIC, VERSION, self)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let m: TopicModel = modelfile::load(path, MAGIC, VERSION)?;
        if m.labels.len() != m.counts.len() || m.labels.len() != m.log_priors.len() || !m.dim.is_power_of_two() {
            return Err(Error::model(path, "inconsistent topic model tables"));
        }
        Ok(m)
    }
}

pub fn classify_topic(text: &str, model: &TopicModel) -> (String, BTreeMap<String, f64>) {
    model.classify(text)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplingPolicy {
    /// Labels not listed are kept with probability 1.
    pub keep_prob: BTreeMap<String, f64>,
    pub seed: u64,
}

impl Default for SamplingPolicy {
    fn default() -> Self {
        SamplingPolicy { keep_prob: BTreeMap::from([("ads".to_string(), 0.1)]), seed: 0 }
    }
}

impl SamplingPolicy {
    pub fn validate(&self) -> Vec<String> {
        self.keep_prob
            .iter()
            .filter(|(_, p)| !(0.0..=1.0).contains(*p))
            .map(|(l, p)| format!("keep_prob for {l:?} = {p} is outside [0, 1]"))
            .collect()
    }

    pub fn keep_prob(&self, label: &str) -> f64 {
        self.keep_prob.get(label).copied().unwrap_or(1.0)
    }

    /// Keeps iff unit(hash64(id, seed)) < keep_prob(label); a pure function
    /// of (id, seed, label).
    pub fn keep(&self, id: &str, label: &str) -> bool {
        unit_interval(hash64(id.as_bytes(), self.seed)) < self.keep_prob(label)
    }
}

/// Keep mask over (id, label) pairs.
pub fn downsample(docs: &[(&str, Option<&str>)], policy: &SamplingPolicy) -> Result<Vec<bool>> {
    docs.iter()
        .map(|&(id, label)| {
            let label = label.ok_or_else(|| Error::UnlabeledDoc(id.to_string()))?;
            Ok(policy.keep(id, label))
        })
        .collect()
}
