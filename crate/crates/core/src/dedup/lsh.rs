//! Banded locality-sensitive hashing over MinHash signatures.

use rustc_hash::FxHashMap;

use super::minhash::{Signature, NUM_PERM};
use crate::error::{Error, Result};
use crate::hashing::hash64;

/// Band tables keyed by band hash; documents are referred to by their
/// registration index.
#[derive(Debug, Clone)]
pub struct LshIndex {
    pub bands: usize,
    pub rows: usize,
    tables: Vec<FxHashMap<u64, Vec<u32>>>,
    ids: Vec<String>,
    index: FxHashMap<String, u32>,
}

impl LshIndex {
    pub fn new(bands: usize, rows: usize) -> Result<Self> {
        if bands == 0 || rows == 0 || bands * rows != NUM_PERM {
            return Err(Error::Invalid(format!(
                "bands ({bands}) x rows ({rows}) must equal the signature length {NUM_PERM}"
            )));
        }
        Ok(LshIndex {
            bands,
            rows,
            tables: vec![FxHashMap::default(); bands],
            ids: Vec::new(),
            index: FxHashMap::default(),
        })
    }

    /// Similarity at which a pair becomes a candidate with probability
    /// about one half: (1/b)^(1/r).
    pub fn threshold(&self) -> f64 {
        (1.0 / self.bands as f64).powf(1.0 / self.rows as f64)
    }

    /// Probability that a pair with Jaccard `j` shares at least one band.
    pub fn candidate_probability(&self, j: f64) -> f64 {
        1.0 - (1.0 - j.powi(self.rows as i32)).powi(self.bands as i32)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, idx: u32) -> &str {
        &self.ids[idx as usize]
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    fn band_hash(&self, sig: &Signature, band: usize) -> u64 {
        let rows = &sig[band * self.rows..(band + 1) * self.rows];
        let mut bytes = [0u8; NUM_PERM * 8];
        for (i, r) in rows.iter().enumerate() {
            bytes[i * 8..i * 8 + 8].copy_from_slice(&r.to_le_bytes());
        }
        hash64(&bytes[..rows.len() * 8], band as u64)
    }

    /// Registered documents sharing at least one full band with `sig`,
    /// sorted by registration index.
    pub fn candidates(&self, sig: &Signature) -> Vec<u32> {
        let mut out = Vec::new();
        for band in 0..self.bands {
            if let Some(bucket) = self.tables[band].get(&self.band_hash(sig, band)) {
                out.extend_from_slice(bucket);
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Returns the candidates found before inserting, then registers the
    /// document.
    pub fn insert_and_candidates(&mut self, sig: &Signature, id: &str) -> Result<Vec<u32>> {
        if self.index.contains_key(id) {
            return Err(Error::DuplicateDocId(id.to_string()));
        }
        let found = self.candidates(sig);
        let idx = self.ids.len() as u32;
        for band in 0..self.bands {
            let h = self.band_hash(sig, band);
            self.tables[band].entry(h).or_default().push(idx);
        }
        self.ids.push(id.to_string());
        self.index.insert(id.to_string(), idx);
        Ok(found)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(f: impl Fn(usize) -> u64) -> Signature {
        std::array::from_fn(f)
    }

    #[test]
    fn same_signature_is_candidate() {
        let mut idx = LshIndex::new(16, 8).unwrap();
        let s = sig(|i| i as u64 * 7);
        assert!(idx.insert_and_candidates(&s, "a").unwrap().is_empty());
        assert_eq!(idx.insert_and_candidates(&s, "b").unwrap(), vec![0]);
        assert_eq!(idx.id(0), "a");
        assert!(matches!(idx.insert_and_candidates(&s, "a"), Err(Error::DuplicateDocId(_))));
    }

    #[test]
    fn fully_different_signatures_never_collide() {
        let mut idx = LshIndex::new(16, 8).unwrap();
        idx.insert_and_candidates(&sig(|i| i as u64), "a").unwrap();
        assert!(idx.insert_and_candidates(&sig(|i| i as u64 + 1000), "b").unwrap().is_empty());
    }

    #[test]
    fn shape_and_threshold() {
        assert!(LshIndex::new(16, 7).is_err());
        let idx = LshIndex::new(16, 8).unwrap();
        assert!((idx.threshold() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-3);
        assert!((idx.candidate_probability(0.8) - 0.947).abs() < 1e-3);
        let wide = LshIndex::new(32, 4).unwrap();
        assert!(wide.candidate_probability(0.75) > 0.9999);
    }
}
