//! Logistic regression over hashed features, trained by SGD.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::features::{featurize, HashedFeatureVector, DEFAULT_DIM};
use crate::error::{Error, Result};
use crate::hashing::hash64;
use crate::modelfile;

const MAGIC: &str = "curate-linear";
const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub dim: u32,
    pub epochs: u32,
    pub learning_rate: f64,
    pub l2: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig { dim: DEFAULT_DIM, epochs: 8, learning_rate: 0.5, l2: 1e-6, seed: 0 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainMeta {
    pub kind: String,
    pub epochs: u32,
    pub seed: u64,
    pub positive_tag: String,
    pub negative_tag: String,
    pub positives: usize,
    pub negatives: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearClassifier {
    pub dim: u32,
    pub weights: Vec<f64>,
    pub bias: f64,
    pub meta: TrainMeta,
}

#[inline]
fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl LinearClassifier {
    /// Trains on positives (label 1) and negatives (label 0). Each epoch
    /// visits examples in an order fixed by hashing their text with the
    /// seed, so the result does not depend on which class an example came
    /// from.
    pub fn train(positives: &[&str], negatives: &[&str], cfg: &TrainConfig) -> Result<Self> {
        if positives.is_empty() || negatives.is_empty() {
            return Err(Error::OneClassOnly);
        }
        if !cfg.dim.is_power_of_two() || cfg.learning_rate <= 0.0 || cfg.l2 < 0.0 {
            return Err(Error::Invalid("classifier dim must be a power of two and learning_rate positive".into()));
        }
        let examples: Vec<(HashedFeatureVector, f64, &str)> = positives
            .iter()
            .map(|t| (t, 1.0))
            .chain(negatives.iter().map(|t| (t, 0.0)))
            .map(|(t, y)| (featurize(t, cfg.dim), y, *t))
            .collect();
        let n = examples.len();
        // weights = scale * v, so that L2 shrinkage is O(1) per step
        let mut v = vec![0.0f64; cfg.dim as usize];
        let mut scale = 1.0f64;
        let mut bias = 0.0f64;
        let mut order: Vec<usize> = (0..n).collect();
        let mut step = 0u64;
        for epoch in 0..cfg.epochs {
            let salt = cfg.seed.wrapping_add(epoch as u64);
            let keys: Vec<u64> = examples.iter().map(|e| hash64(e.2.as_bytes(), salt)).collect();
            order.sort_by_key(|&i| (keys[i], i));
            for &i in &order {
                let (x, y, _) = &examples[i];
                let lr = cfg.learning_rate / (1.0 + step as f64 / n as f64);
                step += 1;
                let z = scale * x.entries.iter().map(|&(j, xv)| v[j as usize] * xv as f64).sum::<f64>() + bias;
                let g = sigmoid(z) - y;
                scale *= 1.0 - lr * cfg.l2;
                if scale < 1e-9 {
                    v.iter_mut().for_each(|w| *w *= scale);
                    scale = 1.0;
                }
                for &(j, xv) in &x.entries {
                    v[j as usize] -= lr * g * xv as f64 / scale;
                }
                bias -= lr * g;
            }
        }
        v.iter_mut().for_each(|w| *w *= scale);
        Ok(LinearClassifier {
            dim: cfg.dim,
            weights: v,
            bias,
            meta: TrainMeta {
                epochs: cfg.epochs,
                seed: cfg.seed,
                positives: positives.len(),
                negatives: negatives.len(),
                ..Default::default()
            },
        })
    }

    pub fn score_vector(&self, x: &HashedFeatureVector) -> f64 {
        let z: f64 = x.entries.iter().map(|&(j, xv)| self.weights[j as usize] * xv as f64).sum();
        sigmoid(z + self.bias)
    }

    /// Probability of the positive class.
    pub fn score(&self, text: &str) -> f64 {
        self.score_vector(&featurize(text, self.dim))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let weights: Vec<(u32, f64)> =
            self.weights.iter().enumerate().filter(|(_, w)| **w != 0.0).map(|(i, &w)| (i as u32, w)).collect();
        let file = ClassifierFile { dim: self.dim, bias: self.bias, meta: self.meta.clone(), weights };
        modelfile::save(path, MAGIC, VERSION, &file)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file: ClassifierFile = modelfile::load(path, MAGIC, VERSION)?;
        if !file.dim.is_power_of_two() {
            return Err(Error::model(path, "dimension is not a power of two"));
        }
        let mut weights = vec![0.0; file.dim as usize];
        for (i, w) in file.weights {
            *weights
                .get_mut(i as usize)
                .ok_or_else(|| Error::model(path, format!("weight index {i} out of range")))? = w;
        }
        Ok(LinearClassifier { dim: file.dim, weights, bias: file.bias, meta: file.meta })
    }
}

#[derive(Serialize, Deserialize)]
struct ClassifierFile {
    dim: u32,
    bias: f64,
    meta: TrainMeta,
    weights: Vec<(u32, f64)>,
}

pub fn train_classifier(positives: &[&str], negatives: &[&str], cfg: &TrainConfig) -> Result<LinearClassifier> {
    LinearClassifier::train(positives, negatives, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> TrainConfig {
        TrainConfig { dim: 1 << 12, ..Default::default() }
    }

    #[test]
    fn separable_one_word() {
        let c = LinearClassifier::train(&["good"], &["bad"], &small()).unwrap();
        assert!(c.score("good") > 0.5);
        assert!(c.score("bad") < 0.5);
    }

    #[test]
    fn empty_doc_scores_bias() {
        let c = LinearClassifier::train(&["good"], &["bad"], &small()).unwrap();
        assert_eq!(c.score(""), sigmoid(c.bias));
    }

    #[test]
    fn one_class_only() {
        assert!(matches!(LinearClassifier::train(&["x"], &[], &small()), Err(Error::OneClassOnly)));
    }

    #[test]
    fn label_flip_complements() {
        let pos = ["the river flows to the sea", "a quiet village by the hills", "history of the old mill"];
        let neg = ["buy now cheap deals", "click here win prize", "free offer limited time only"];
        let a = LinearClassifier::train(&pos, &neg, &small()).unwrap();
        let b = LinearClassifier::train(&neg, &pos, &small()).unwrap();
        for t in pos.iter().chain(&neg).chain(&["unseen words here", ""]) {
            assert!((a.score(t) + b.score(t) - 1.0).abs() < 1e-9, "{t}");
        }
    }

    #[test]
    fn reproducible_and_round_trips() {
        let pos = ["alpha beta", "beta gamma"];
        let neg = ["delta epsilon", "epsilon zeta"];
        let a = LinearClassifier::train(&pos, &neg, &small()).unwrap();
        let b = LinearClassifier::train(&pos, &neg, &small()).unwrap();
        assert_eq!(a, b);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("q.json");
        a.save(&path).unwrap();
        assert_eq!(LinearClassifier::load(&path).unwrap(), a);
    }
}
