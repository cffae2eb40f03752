//! Document-level near-duplicate removal: MinHash signatures, LSH
//! candidates, optional exact-Jaccard verification, union-find.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::clusters::{resolve_clusters, DupCluster};
use super::lsh::LshIndex;
use super::minhash::{jaccard, matching_positions, minhash_signature, shingles, Signature, NUM_PERM};
use super::snapshot::DedupSnapshot;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NearDupConfig {
    pub bands: usize,
    pub rows: usize,
    /// Candidate pairs below this exact shingle Jaccard are discarded;
    /// `None` accepts every LSH candidate.
    pub verify_cutoff: Option<f64>,
}

impl Default for NearDupConfig {
    fn default() -> Self {
        NearDupConfig { bands: 32, rows: 4, verify_cutoff: Some(0.7) }
    }
}

impl NearDupConfig {
    pub fn validate(&self) -> Vec<String> {
        let mut errors = Vec::new();
        if self.bands * self.rows != NUM_PERM {
            errors.push(format!("bands x rows must equal {NUM_PERM}"));
        }
        if let Some(c) = self.verify_cutoff {
            if !(0.0..=1.0).contains(&c) {
                errors.push("verify_cutoff must lie in [0, 1]".into());
            }
        }
        errors
    }
}

#[derive(Debug, Clone, Default)]
pub struct NearDupResult {
    /// Parallel to the input; false for dropped near-duplicates.
    pub keep: Vec<bool>,
    pub clusters: Vec<DupCluster>,
    pub candidate_pairs: usize,
    pub verified_pairs: usize,
    /// Documents with fewer than five words, passed through untouched.
    pub bypassed: usize,
}

/// Input documents must have distinct ids. Documents are registered in
/// ascending id order, so the result does not depend on input order. With
/// a snapshot, new documents near a snapshot document are dropped; pairs
/// against snapshot documents are verified on signature agreement because
/// their shingles are not stored.
pub fn near_duplicates(
    docs: &[(&str, &str)],
    cfg: &NearDupConfig,
    snapshot: Option<&DedupSnapshot>,
) -> Result<NearDupResult> {
    let mut index = LshIndex::new(cfg.bands, cfg.rows)?;
    let prior: &[(String, Box<Signature>)] = snapshot.map_or(&[], |s| &s.entries);
    for (id, sig) in prior {
        index.insert_and_candidates(sig, id)?;
    }
    let n_prior = prior.len();

    let mut order: Vec<usize> = (0..docs.len()).collect();
    order.sort_by(|&a, &b| docs[a].0.cmp(docs[b].0));
    let features: Vec<(Vec<u64>, Option<Box<Signature>>)> = order
        .par_iter()
        .map(|&i| {
            let sh = shingles(docs[i].1);
            let sig = minhash_signature(&sh);
            (sh, sig)
        })
        .collect();

    let mut result = NearDupResult { keep: vec![true; docs.len()], ..Default::default() };
    // registration index -> position in `order`, for new documents
    let mut reg_pos: Vec<usize> = Vec::new();
    let mut pairs: Vec<(u32, u32)> = Vec::new();
    let mut dropped_by_prior = Vec::new();
    for (pos, &i) in order.iter().enumerate() {
        let Some(sig) = &features[pos].1 else {
            result.bypassed += 1;
            continue;
        };
        let reg = index.len() as u32;
        let found = index.insert_and_candidates(sig, docs[i].0)?;
        reg_pos.push(pos);
        for other in found {
            result.candidate_pairs += 1;
            let similar = if (other as usize) < n_prior {
                let est = matching_positions(&prior[other as usize].1, sig) as f64 / NUM_PERM as f64;
                cfg.verify_cutoff.is_none_or(|c| est >= c)
            } else {
                let opos = reg_pos[other as usize - n_prior];
                cfg.verify_cutoff.is_none_or(|c| jaccard(&features[opos].0, &features[pos].0) >= c)
            };
            if similar {
                result.verified_pairs += 1;
                if (other as usize) < n_prior {
                    dropped_by_prior.push(i);
                } else {
                    pairs.push((other - n_prior as u32, reg - n_prior as u32));
                }
            }
        }
    }
    let reg_ids: Vec<&str> = reg_pos.iter().map(|&p| docs[order[p]].0).collect();
    result.clusters = resolve_clusters(&reg_ids, &pairs);
    let mut id_to_input: rustc_hash::FxHashMap<&str, usize> = Default::default();
    for (i, d) in docs.iter().enumerate() {
        if id_to_input.insert(d.0, i).is_some() {
            return Err(Error::DuplicateDocId(d.0.to_string()));
        }
    }
    for c in &result.clusters {
        for m in &c.members[1..] {
            result.keep[id_to_input[m.as_str()]] = false;
        }
    }
    for i in dropped_by_prior {
        result.keep[i] = false;
    }
    Ok(result)
}
