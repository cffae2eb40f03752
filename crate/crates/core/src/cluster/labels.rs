//! Cluster-level quality verdicts with manual overrides.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClusterVerdict {
    Keep,
    Drop,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterLabel {
    pub id: usize,
    pub count: usize,
    /// Zero for empty clusters.
    pub mean_quality: f64,
    pub computed: ClusterVerdict,
    pub manual: Option<ClusterVerdict>,
}

impl ClusterLabel {
    pub fn verdict(&self) -> ClusterVerdict {
        self.manual.unwrap_or(self.computed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterLabelMap {
    pub q_min: f64,
    pub clusters: Vec<ClusterLabel>,
}

impl ClusterLabelMap {
    pub fn verdict(&self, cluster: usize) -> ClusterVerdict {
        self.clusters[cluster].verdict()
    }
}

/// Parses "cluster_id keep|drop # comment" lines; blank and comment-only
/// lines are skipped.
pub fn parse_overrides(text: &str) -> Result<BTreeMap<usize, ClusterVerdict>> {
    let mut out = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let bad =
            || Error::Invalid(format!("override line {}: expected \"<cluster_id> keep|drop\", got {line:?}", n + 1));
        let mut parts = body.split_whitespace();
        let id: usize = parts.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
        let verdict = match parts.next() {
            Some("keep") => ClusterVerdict::Keep,
            Some("drop") => ClusterVerdict::Drop,
            _ => return Err(bad()),
        };
        if parts.next().is_some() {
            return Err(bad());
        }
        out.insert(id, verdict);
    }
    Ok(out)
}

pub fn load_overrides(path: &Path) -> Result<BTreeMap<usize, ClusterVerdict>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_overrides(&text)
}

/// `docs` holds (doc id, cluster id, quality score) per document. A cluster
/// is dropped when its mean quality is below `q_min` or an override says
/// so; empty clusters are kept.
pub fn label_clusters(
    k: usize,
    docs: &[(&str, usize, Option<f64>)],
    q_min: f64,
    overrides: &BTreeMap<usize, ClusterVerdict>,
) -> Result<ClusterLabelMap> {
    let mut sums = vec![(0usize, 0.0f64); k];
    for &(id, cluster, score) in docs {
        let score = score.ok_or_else(|| Error::MissingScores(id.to_string()))?;
        if cluster >= k {
            return Err(Error::Invalid(format!("document {id:?} assigned to cluster {cluster} >= k = {k}")));
        }
        sums[cluster].0 += 1;
        sums[cluster].1 += score;
    }
    let clusters = sums
        .into_iter()
        .enumerate()
        .map(|(id, (count, sum))| {
            let mean_quality = if count == 0 { 0.0 } else { sum / count as f64 };
            let computed = if count > 0 && mean_quality < q_min { ClusterVerdict::Drop } else { ClusterVerdict::Keep };
            ClusterLabel { id, count, mean_quality, computed, manual: overrides.get(&id).copied() }
        })
        .collect();
    Ok(ClusterLabelMap { q_min, clusters })
}
