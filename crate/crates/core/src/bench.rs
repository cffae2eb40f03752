//! Throughput harness for the heuristic filter and MinHash signatures.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::Document;
use crate::dedup::signature_of;
use crate::error::{Error, Result};
use crate::heuristics::{HeuristicConfig, HeuristicFilter};

/// Soft per-worker floors in MB/s (1 MB = 10^6 bytes of UTF-8 text).
pub const HEURISTIC_FLOOR_MB_S: f64 = 20.0;
pub const MINHASH_FLOOR_MB_S: f64 = 5.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchResult {
    pub name: String,
    pub workers: usize,
    pub docs: usize,
    pub bytes: u64,
    pub rounds: usize,
    pub seconds: f64,
    pub mb_per_sec: f64,
    pub mb_per_sec_per_worker: f64,
    pub floor_mb_per_sec_per_worker: f64,
    pub meets_floor: bool,
}

impl BenchResult {
    pub fn to_text(&self) -> String {
        format!(
            "{:<10} {:>3} workers  {:>8.2} MB/s  {:>8.2} MB/s/worker  floor {:>5.1}  {}",
            self.name,
            self.workers,
            self.mb_per_sec,
            self.mb_per_sec_per_worker,
            self.floor_mb_per_sec_per_worker,
            if self.meets_floor { "ok" } else { "BELOW" }
        )
    }
}

fn measure<F>(name: &str, docs: &[Document], workers: usize, min_seconds: f64, floor: f64, f: F) -> Result<BenchResult>
where
    F: Fn(&Document) -> usize + Sync,
{
    let pool =
        rayon::ThreadPoolBuilder::new().num_threads(workers).build().map_err(|e| Error::Invalid(e.to_string()))?;
    let bytes: u64 = docs.iter().map(|d| d.text.len() as u64).sum();
    // warm-up pass
    let mut sink = pool.install(|| docs.par_iter().map(&f).reduce(|| 0, usize::wrapping_add));
    let start = Instant::now();
    let mut rounds = 0;
    while rounds == 0 || start.elapsed().as_secs_f64() < min_seconds {
        sink = sink.wrapping_add(pool.install(|| docs.par_iter().map(&f).reduce(|| 0, usize::wrapping_add)));
        rounds += 1;
    }
    std::hint::black_box(sink);
    let seconds = start.elapsed().as_secs_f64();
    let mb_per_sec = (bytes * rounds as u64) as f64 / 1e6 / seconds;
    let per_worker = mb_per_sec / workers as f64;
    Ok(BenchResult {
        name: name.to_string(),
        workers,
        docs: docs.len(),
        bytes,
        rounds,
        seconds,
        mb_per_sec,
        mb_per_sec_per_worker: per_worker,
        floor_mb_per_sec_per_worker: floor,
        meets_floor: per_worker >= floor,
    })
}

/// Default heuristic cascade, PII masking included.
pub fn bench_heuristics(docs: &[Document], workers: usize, min_seconds: f64) -> Result<BenchResult> {
    let filter = HeuristicFilter::new(HeuristicConfig::default(), Default::default());
    measure("heuristic", docs, workers, min_seconds, HEURISTIC_FLOOR_MB_S, |d| {
        let out = filter.evaluate(d);
        out.verdict.keep as usize + out.pii_replacements
    })
}

/// Shingling plus 128-permutation signatures.
pub fn bench_minhash(docs: &[Document], workers: usize, min_seconds: f64) -> Result<BenchResult> {
    measure("minhash", docs, workers, min_seconds, MINHASH_FLOOR_MB_S, |d| {
        signature_of(&d.text).map_or(0, |s| s[0] as usize)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reports_rates() {
        let docs: Vec<Document> =
            (0..20).map(|i| Document::new(format!("d{i}"), "the cat sat on the mat. ".repeat(40))).collect();
        let r = bench_minhash(&docs, 1, 0.0).unwrap();
        assert_eq!(r.rounds, 1);
        assert_eq!(r.bytes, 20 * 24 * 40);
        assert!(r.mb_per_sec > 0.0);
        assert_eq!(r.mb_per_sec, r.mb_per_sec_per_worker);
    }
}
