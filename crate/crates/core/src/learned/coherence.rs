//! Adjacent-paragraph similarity: keep, split or drop documents made of
//! unrelated pieces.

use serde::{Deserialize, Serialize};

use super::features::{clipped_cosine, featurize, DEFAULT_DIM};
use crate::corpus::Document;
use crate::error::{Error, Result};
use crate::heuristics::segment::paragraph_spans;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CoherenceConfig {
    pub c_keep: f64,
    pub c_cut: f64,
    pub c_drop: f64,
    pub dim: u32,
}

impl Default for CoherenceConfig {
    fn default() -> Self {
        CoherenceConfig { c_keep: 0.15, c_cut: 0.05, c_drop: 0.02, dim: DEFAULT_DIM }
    }
}

impl CoherenceConfig {
    pub fn validate(&self) -> Vec<String> {
        let mut errors = Vec::new();
        if !(self.c_drop <= self.c_keep && self.c_cut <= self.c_keep) {
            errors.push("coherence thresholds need c_drop <= c_keep and c_cut <= c_keep".into());
        }
        if !self.dim.is_power_of_two() {
            errors.push("coherence dim must be a power of two".into());
        }
        errors
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoherenceAction {
    Keep,
    /// Boundary indices to cut at; boundary i separates paragraphs i and
    /// i + 1.
    SegmentAt(Vec<usize>),
    Drop,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherenceReport {
    pub similarities: Vec<f64>,
    pub mean: f64,
    pub action: CoherenceAction,
}

pub fn coherence_report(doc: &Document, cfg: &CoherenceConfig) -> CoherenceReport {
    let spans = paragraph_spans(&doc.text);
    let vectors: Vec<_> = spans.iter().map(|r| featurize(&doc.text[r.clone()], cfg.dim)).collect();
    let similarities: Vec<f64> = vectors.windows(2).map(|w| clipped_cosine(&w[0], &w[1])).collect();
    if similarities.is_empty() {
        return CoherenceReport { similarities, mean: 1.0, action: CoherenceAction::Keep };
    }
    let mean = similarities.iter().sum::<f64>() / similarities.len() as f64;
    let action = if mean >= cfg.c_keep {
        CoherenceAction::Keep
    } else if mean < cfg.c_drop {
        CoherenceAction::Drop
    } else {
        let cuts: Vec<usize> =
            similarities.iter().enumerate().filter(|(_, &s)| s < cfg.c_cut).map(|(i, _)| i).collect();
        if cuts.is_empty() {
            CoherenceAction::Keep
        } else {
            CoherenceAction::SegmentAt(cuts)
        }
    };
    CoherenceReport { similarities, mean, action }
}

/// Applies a report to the document it was computed from. Segments carry
/// the exact original text of their paragraph group and ids suffixed
/// "#k" (0-based).
pub fn apply_coherence(doc: &Document, report: &CoherenceReport) -> Result<Vec<Document>> {
    let spans = paragraph_spans(&doc.text);
    let expected = spans.len().saturating_sub(1);
    if report.similarities.len() != expected {
        return Err(Error::ReportMismatch { boundaries: report.similarities.len(), paragraphs: spans.len() });
    }
    match &report.action {
        CoherenceAction::Keep => Ok(vec![doc.clone()]),
        CoherenceAction::Drop => Ok(Vec::new()),
        CoherenceAction::SegmentAt(cuts) => {
            if cuts.iter().any(|&c| c >= expected) || cuts.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::ReportMismatch { boundaries: report.similarities.len(), paragraphs: spans.len() });
            }
            let mut out = Vec::with_capacity(cuts.len() + 1);
            let mut first = 0;
            for (k, last) in cuts.iter().copied().chain([spans.len() - 1]).enumerate() {
                let text = &doc.text[spans[first].start..spans[last].end];
                let mut seg = doc.clone();
                seg.id = format!("{}#{k}", doc.id);
                seg.text = text.to_string();
                out.push(seg);
                first = last + 1;
            }
            Ok(out)
        }
    }
}
