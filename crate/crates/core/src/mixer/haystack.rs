//! Needle-in-a-haystack instance generation.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hashing::hash64;
use crate::tokenizer::{TokenCorpusWriter, Tokenizer};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeedleSpec {
    pub needle: String,
    pub question: String,
    pub answer: String,
}

impl Default for NeedleSpec {
    fn default() -> Self {
        NeedleSpec {
            needle: " The best thing to do in San Francisco is eat a sandwich and sit in Dolores Park on a sunny day."
                .into(),
            question: "What is the best thing to do in San Francisco?".into(),
            answer: "Eat a sandwich and sit in Dolores Park on a sunny day.".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HaystackInstance {
    pub instance_id: String,
    pub length: usize,
    pub depth: f64,
    pub needle_offset: usize,
    pub needle_len: usize,
    pub question: String,
    pub answer: String,
    #[serde(skip)]
    pub tokens: Vec<u32>,
}

/// Offset at which the needle starts: round(depth x (L - n)).
pub fn needle_offset(length: usize, needle_len: usize, depth: f64) -> usize {
    (depth * (length - needle_len) as f64).round() as usize
}

/// Builds one instance of exactly `length` tokens: filler read cyclically
/// from the corpus starting at a document chosen by hash(seed, length,
/// depth), truncated to L - n tokens, with the needle inserted at
/// [`needle_offset`].
pub fn make_haystack(
    corpus: &[Vec<u32>],
    needle: &[u32],
    spec: &NeedleSpec,
    length: usize,
    depth: f64,
    seed: u64,
) -> Result<HaystackInstance> {
    if !(0.0..=1.0).contains(&depth) {
        return Err(Error::InvalidNeedle(format!("depth {depth} is outside [0, 1]")));
    }
    if needle.is_empty() || needle.len() >= length {
        return Err(Error::InvalidNeedle(format!("needle has {} tokens, haystack length is {length}", needle.len())));
    }
    let need = length - needle.len();
    let available: usize = corpus.iter().map(Vec::len).sum();
    if available < need {
        return Err(Error::CorpusTooSmall { available, needed: need });
    }
    let mut key = Vec::with_capacity(24);
    key.extend_from_slice(&(length as u64).to_le_bytes());
    key.extend_from_slice(&depth.to_bits().to_le_bytes());
    let start = (hash64(&key, seed) % corpus.len() as u64) as usize;
    let mut filler: Vec<u32> = Vec::with_capacity(need);
    for k in 0..corpus.len() {
        let doc = &corpus[(start + k) % corpus.len()];
        filler.extend_from_slice(&doc[..doc.len().min(need - filler.len())]);
        if filler.len() == need {
            break;
        }
    }
    let at = needle_offset(length, needle.len(), depth);
    let mut tokens = Vec::with_capacity(length);
    tokens.extend_from_slice(&filler[..at]);
    tokens.extend_from_slice(needle);
    tokens.extend_from_slice(&filler[at..]);
    Ok(HaystackInstance {
        instance_id: format!("haystack-L{length}-d{depth:.4}"),
        length,
        depth,
        needle_offset: at,
        needle_len: needle.len(),
        question: spec.question.clone(),
        answer: spec.answer.clone(),
        tokens,
    })
}

/// Ten evenly spaced lengths from 1K to 16K tokens (rounded to 64).
pub fn default_lengths() -> Vec<usize> {
    (0..10).map(|i| (1024 + i * (16384 - 1024) / 9) / 64 * 64).collect()
}

/// Ten evenly spaced depths from 0 to 1.
pub fn default_depths() -> Vec<f64> {
    (0..10).map(|i| i as f64 / 9.0).collect()
}

/// One instance per (length, depth), lengths outermost.
pub fn haystack_grid(
    corpus: &[Vec<u32>],
    tokenizer: &Tokenizer,
    spec: &NeedleSpec,
    lengths: &[usize],
    depths: &[f64],
    seed: u64,
) -> Result<Vec<HaystackInstance>> {
    if lengths.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Invalid("haystack lengths must be strictly ascending".into()));
    }
    let needle = tokenizer.encode(&spec.needle);
    let mut out = Vec::with_capacity(lengths.len() * depths.len());
    for &l in lengths {
        for &d in depths {
            out.push(make_haystack(corpus, &needle, spec, l, d, seed)?);
        }
    }
    Ok(out)
}

/// Writes instances as a token corpus plus a JSONL manifest.
pub fn write_grid(instances: &[HaystackInstance], tokens_path: &Path, manifest_path: &Path) -> Result<()> {
    let mut w = TokenCorpusWriter::create(tokens_path)?;
    let file = std::fs::File::create(manifest_path).map_err(|e| Error::io(manifest_path, e))?;
    let mut m = std::io::BufWriter::new(file);
    for inst in instances {
        w.write(&inst.instance_id, &inst.tokens)?;
        let line = serde_json::to_string(inst).map_err(|e| Error::Invalid(e.to_string()))?;
        writeln!(m, "{line}").map_err(|e| Error::io(manifest_path, e))?;
    }
    w.finish()?;
    m.flush().map_err(|e| Error::io(manifest_path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corpus() -> Vec<Vec<u32>> {
        (0..20).map(|d| (0..100).map(|i| 1000 + d * 100 + i).collect()).collect()
    }

    #[test]
    fn boundary_depths() {
        let needle = [7, 8, 9];
        let spec = NeedleSpec::default();
        let top = make_haystack(&corpus(), &needle, &spec, 500, 0.0, 1).unwrap();
        assert_eq!(&top.tokens[..3], &needle);
        let bottom = make_haystack(&corpus(), &needle, &spec, 500, 1.0, 1).unwrap();
        assert_eq!(&bottom.tokens[497..], &needle);
        assert_eq!(bottom.tokens.len(), 500);
    }

    #[test]
    fn errors() {
        let spec = NeedleSpec::default();
        assert!(matches!(
            make_haystack(&corpus(), &[1], &spec, 5000, 0.5, 0),
            Err(Error::CorpusTooSmall { available: 2000, needed: 4999 })
        ));
        assert!(matches!(make_haystack(&corpus(), &[1, 2], &spec, 2, 0.5, 0), Err(Error::InvalidNeedle(_))));
        assert!(matches!(make_haystack(&corpus(), &[1], &spec, 20, 1.5, 0), Err(Error::InvalidNeedle(_))));
    }

    #[test]
    fn default_grid_shape() {
        let l = default_lengths();
        assert_eq!(l.len(), 10);
        assert_eq!(l[0], 1024);
        assert_eq!(l[9], 16384);
        assert_eq!(default_depths()[9], 1.0);
    }
}
