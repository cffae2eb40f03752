//! Length-bucketed upsampling.

use serde::{Deserialize, Serialize};

use crate::hashing::{hash64, unit_interval};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UpsampleWeights {
    /// Ascending token-count boundaries; bucket i covers
    /// [boundaries[i-1], boundaries[i]).
    pub boundaries: Vec<usize>,
    /// One more entry than `boundaries`.
    pub weights: Vec<f64>,
    pub seed: u64,
}

impl Default for UpsampleWeights {
    fn default() -> Self {
        UpsampleWeights { boundaries: vec![4096, 32768], weights: vec![1.0, 1.0, 3.0], seed: 0 }
    }
}

impl UpsampleWeights {
    pub fn validate(&self) -> Vec<String> {
        let mut errors = Vec::new();
        if self.weights.len() != self.boundaries.len() + 1 {
            errors.push("upsample weights need one entry more than boundaries".into());
        }
        if self.weights.iter().any(|&w| !(w > 0.0 && w.is_finite())) {
            errors.push("upsample weights must be positive".into());
        }
        if self.boundaries.windows(2).any(|w| w[0] >= w[1]) {
            errors.push("upsample boundaries must be strictly ascending".into());
        }
        errors
    }

    pub fn bucket(&self, tokens: usize) -> usize {
        self.boundaries.partition_point(|&b| b <= tokens)
    }

    pub fn weight(&self, tokens: usize) -> f64 {
        self.weights[self.bucket(tokens)]
    }

    /// floor(w) copies plus one more when unit(hash(id, seed)) < frac(w).
    pub fn copies(&self, id: &str, tokens: usize) -> usize {
        let w = self.weight(tokens);
        let whole = w.floor();
        let extra = unit_interval(hash64(id.as_bytes(), self.seed)) < w - whole;
        whole as usize + extra as usize
    }
}

/// Name of the k-th copy: the original id for k = 0, "id@k" after.
pub fn copy_id(id: &str, k: usize) -> String {
    if k == 0 {
        id.to_string()
    } else {
        format!("{id}@{k}")
    }
}

/// Expands (id, token count) pairs into emitted copy ids, in input order.
pub fn length_upsample(docs: &[(&str, usize)], weights: &UpsampleWeights) -> Vec<(usize, String)> {
    let mut out = Vec::new();
    for (i, &(id, n)) in docs.iter().enumerate() {
        for k in 0..weights.copies(id, n) {
            out.push((i, copy_id(id, k)));
        }
    }
    out
}
