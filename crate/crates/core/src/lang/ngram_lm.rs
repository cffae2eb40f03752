//! Word n-gram language model with interpolated modified Kneser-Ney
//! smoothing.

use std::path::Path;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::corpus::dedup_normalize;
use crate::error::{Error, Result};
use crate::heuristics::segment::for_each_word;
use crate::modelfile;

pub const UNK: u32 = 0;
pub const BOS: u32 = 1;
pub const EOS: u32 = 2;
const FIRST_WORD: u32 = 3;

const MAGIC: &str = "curate-kn-lm";
const VERSION: u32 = 1;

/// Discounts used when counts-of-counts cannot support the closed-form
/// estimate.
pub const FALLBACK_DISCOUNTS: [f64; 3] = [0.5, 1.0, 1.5];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LmConfig {
    pub order: usize,
    pub min_count: u32,
    /// Pad sentences with `<s>` and predict `</s>`.
    pub boundaries: bool,
}

impl Default for LmConfig {
    fn default() -> Self {
        LmConfig { order: 5, min_count: 2, boundaries: true }
    }
}

type Gram = Box<[u32]>;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct ContextStats {
    total: f64,
    /// Number of continuations with count 1, 2 and >= 3.
    n: [u32; 3],
}

#[derive(Debug, Clone, Default)]
struct Level {
    /// Raw counts at the top order; continuation counts below, except for
    /// n-grams starting with `<s>` which keep raw counts.
    counts: FxHashMap<Gram, u32>,
    contexts: FxHashMap<Gram, ContextStats>,
    discounts: [f64; 3],
}

impl Level {
    fn discount(&self, c: u32) -> f64 {
        match c {
            0 => 0.0,
            1 => self.discounts[0],
            2 => self.discounts[1],
            _ => self.discounts[2],
        }
    }

    fn finish(&mut self) {
        let mut coc = [0u64; 4];
        self.contexts.clear();
        for (gram, &c) in &self.counts {
            if (1..=4).contains(&c) {
                coc[c as usize - 1] += 1;
            }
            let ctx = self.contexts.entry(gram[..gram.len() - 1].into()).or_default();
            ctx.total += c as f64;
            ctx.n[(c.min(3) - 1) as usize] += 1;
        }
        self.discounts = modified_kn_discounts(coc);
    }
}

/// Closed-form modified Kneser-Ney discounts from counts-of-counts
/// n1..n4, falling back to (0.5, 1.0, 1.5) when any is zero or a discount
/// leaves [0, i].
pub fn modified_kn_discounts(coc: [u64; 4]) -> [f64; 3] {
    if coc.contains(&0) {
        return FALLBACK_DISCOUNTS;
    }
    let [n1, n2, n3, n4] = coc.map(|v| v as f64);
    let y = n1 / (n1 + 2.0 * n2);
    let d = [1.0 - 2.0 * y * n2 / n1, 2.0 - 3.0 * y * n3 / n2, 3.0 - 4.0 * y * n4 / n3];
    if d.iter().enumerate().any(|(i, &di)| !(0.0..=(i + 1) as f64).contains(&di)) {
        return FALLBACK_DISCOUNTS;
    }
    d
}

#[derive(Debug, Clone)]
pub struct NgramLm {
    pub config: LmConfig,
    /// Word strings for ids >= 3.
    vocab: Vec<String>,
    index: FxHashMap<String, u32>,
    /// levels[k - 1] holds k-grams.
    levels: Vec<Level>,
    /// Size of the predicted vocabulary: words, `<unk>` and, with
    /// boundaries, `</s>`.
    support: usize,
}

/// Sentences of a document: its non-blank lines after normalization.
pub fn sentences(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split('\n').filter(|l| !l.trim().is_empty()).map(dedup_normalize)
}

impl NgramLm {
    pub fn train<'a, I>(texts: I, config: LmConfig) -> Result<Self>
    where
        I: IntoIterator<Item = &'a str>,
    {
        if config.order == 0 || config.min_count == 0 {
            return Err(Error::Invalid("lm order and min_count must be at least 1".into()));
        }
        let sents: Vec<String> = texts.into_iter().flat_map(sentences).collect();
        let mut freq: FxHashMap<&str, u32> = FxHashMap::default();
        for s in &sents {
            for_each_word(s, |w| *freq.entry(w).or_default() += 1);
        }
        if freq.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let mut kept: Vec<(&str, u32)> = freq.into_iter().filter(|&(_, c)| c >= config.min_count).collect();
        kept.sort_unstable_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
        let vocab: Vec<String> = kept.into_iter().map(|(w, _)| w.to_string()).collect();
        let index = vocab.iter().enumerate().map(|(i, w)| (w.clone(), i as u32 + FIRST_WORD)).collect();
        let mut lm = NgramLm {
            config,
            support: vocab.len() + 1 + config.boundaries as usize,
            vocab,
            index,
            levels: vec![Level::default(); config.order],
        };
        let n = config.order;
        // raw[k - 1]: raw counts of k-grams not ending in <s>
        let mut raw: Vec<FxHashMap<Gram, u32>> = vec![FxHashMap::default(); n];
        for s in &sents {
            let ids = lm.sentence_ids(s);
            for k in 1..=n {
                for w in ids.windows(k) {
                    if w[k - 1] != BOS {
                        *raw[k - 1].entry(w.into()).or_default() += 1;
                    }
                }
            }
        }
        for k in (1..=n).rev() {
            let counts = if k == n {
                raw[k - 1].clone()
            } else {
                let mut counts: FxHashMap<Gram, u32> = FxHashMap::default();
                for gram in raw[k].keys() {
                    let suffix = &gram[1..];
                    if suffix[0] != BOS {
                        *counts.entry(suffix.into()).or_default() += 1;
                    }
                }
                for (gram, &c) in &raw[k - 1] {
                    if gram[0] == BOS {
                        counts.insert(gram.clone(), c);
                    }
                }
                counts
            };
            lm.levels[k - 1].counts = counts;
            lm.levels[k - 1].finish();
        }
        Ok(lm)
    }

    fn sentence_ids(&self, sentence: &str) -> Vec<u32> {
        let mut ids = Vec::new();
        if self.config.boundaries {
            ids.resize(self.config.order - 1, BOS);
        }
        for_each_word(sentence, |w| ids.push(self.word_id(w)));
        if self.config.boundaries {
            ids.push(EOS);
        }
        ids
    }

    pub fn word_id(&self, word: &str) -> u32 {
        self.index.get(word).copied().unwrap_or(UNK)
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab.len()
    }

    /// Every id that receives probability mass.
    pub fn support(&self) -> Vec<u32> {
        let mut ids = vec![UNK];
        if self.config.boundaries {
            ids.push(EOS);
        }
        ids.extend((0..self.vocab.len() as u32).map(|i| i + FIRST_WORD));
        ids
    }

    /// p(word | history); only the last `order - 1` history ids are used.
    pub fn prob(&self, history: &[u32], word: u32) -> f64 {
        let mut p = 1.0 / self.support as f64;
        let max_ctx = (self.config.order - 1).min(history.len());
        let mut gram: Vec<u32> = Vec::with_capacity(max_ctx + 1);
        for k in 0..=max_ctx {
            let ctx = &history[history.len() - k..];
            let level = &self.levels[k];
            let Some(stats) = level.contexts.get(ctx) else {
                break;
            };
            gram.clear();
            gram.extend_from_slice(ctx);
            gram.push(word);
            let c = level.counts.get(gram.as_slice()).copied().unwrap_or(0);
            let [d1, d2, d3] = level.discounts;
            let gamma = (d1 * stats.n[0] as f64 + d2 * stats.n[1] as f64 + d3 * stats.n[2] as f64) / stats.total;
            p = (c as f64 - level.discount(c)).max(0.0) / stats.total + gamma * p;
        }
        p
    }

    /// Log-probabilities of each predicted token of one normalized
    /// sentence.
    pub fn sentence_log_probs(&self, sentence: &str) -> Vec<f64> {
        let ids = self.sentence_ids(sentence);
        let start = if self.config.boundaries { self.config.order - 1 } else { 0 };
        (start..ids.len())
            .map(|i| {
                let lo = i.saturating_sub(self.config.order - 1);
                self.prob(&ids[lo..i], ids[i]).ln()
            })
            .collect()
    }

    /// exp of the mean negative log-probability per predicted token;
    /// +infinity for text without words.
    pub fn perplexity(&self, text: &str) -> f64 {
        let (mut sum, mut n) = (0.0, 0usize);
        for s in sentences(text) {
            for lp in self.sentence_log_probs(&s) {
                sum += lp;
                n += 1;
            }
        }
        if n == 0 {
            return f64::INFINITY;
        }
        (-sum / n as f64).exp()
    }

    pub fn discounts(&self, order: usize) -> [f64; 3] {
        self.levels[order - 1].discounts
    }

    /// Contexts with observed continuations at the top order.
    pub fn top_contexts(&self) -> Vec<Vec<u32>> {
        let mut ctxs: Vec<Vec<u32>> = self.levels[self.config.order - 1].contexts.keys().map(|k| k.to_vec()).collect();
        ctxs.sort_unstable();
        ctxs
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let levels = self
            .levels
            .iter()
            .map(|l| {
                let mut counts: Vec<(Vec<u32>, u32)> = l.counts.iter().map(|(g, &c)| (g.to_vec(), c)).collect();
                counts.sort_unstable();
                LevelFile { discounts: l.discounts, counts }
            })
            .collect();
        let file = LmFile { config: self.config, vocab: self.vocab.clone(), levels };
        modelfile::save(path, MAGIC, VERSION, &file)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file: LmFile = modelfile::load(path, MAGIC, VERSION)?;
        if file.levels.len() != file.config.order || file.config.order == 0 {
            return Err(Error::model(path, "level count does not match order"));
        }
        let index = file.vocab.iter().enumerate().map(|(i, w)| (w.clone(), i as u32 + FIRST_WORD)).collect();
        let max_id = file.vocab.len() as u32 + FIRST_WORD;
        let mut levels = Vec::with_capacity(file.levels.len());
        for (k, lf) in file.levels.into_iter().enumerate() {
            let mut level = Level::default();
            for (gram, c) in lf.counts {
                if gram.len() != k + 1 || gram.iter().any(|&id| id >= max_id) || c == 0 {
                    return Err(Error::model(path, format!("bad {}-gram entry", k + 1)));
                }
                level.counts.insert(gram.into(), c);
            }
            level.finish();
            level.discounts = lf.discounts;
            levels.push(level);
        }
        Ok(NgramLm {
            config: file.config,
            support: file.vocab.len() + 1 + file.config.boundaries as usize,
            vocab: file.vocab,
            index,
            levels,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct LevelFile {
    discounts: [f64; 3],
    counts: Vec<(Vec<u32>, u32)>,
}

#[derive(Serialize, Deserialize)]
struct LmFile {
    config: LmConfig,
    vocab: Vec<String>,
    levels: Vec<LevelFile>,
}

pub fn lm_perplexity(text: &str, lm: &NgramLm) -> f64 {
    lm.perplexity(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lm(text: &str, order: usize, boundaries: bool) -> NgramLm {
        NgramLm::train([text], LmConfig { order, min_count: 2, boundaries }).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn hand_table_without_boundaries() {
        let m = lm("a a b a b", 2, false);
        let (a, b) = (m.word_id("a"), m.word_id("b"));
        assert!(close(m.prob(&[], a), 1.0 / 2.0));
        assert!(close(m.prob(&[], b), 1.0 / 3.0));
        assert!(close(m.prob(&[], UNK), 1.0 / 6.0));
        assert!(close(m.prob(&[a], a), 5.0 / 12.0));
        assert!(close(m.prob(&[a], b), 1.0 / 2.0));
        assert!(close(m.prob(&[a], UNK), 1.0 / 12.0));
        assert!(close(m.prob(&[b], a), 3.0 / 4.0));
        assert!(close(m.prob(&[b], b), 1.0 / 6.0));
        assert!(close(m.prob(&[b], UNK), 1.0 / 12.0));
    }

    #[test]
    fn hand_table_with_boundaries() {
        let m = lm("a a b a b", 2, true);
        let (a, b) = (m.word_id("a"), m.word_id("b"));
        assert!(close(m.prob(&[], a), 0.425));
        assert!(close(m.prob(&[], b), 0.225));
        assert!(close(m.prob(&[], EOS), 0.225));
        assert!(close(m.prob(&[], UNK), 0.125));
        assert!(close(m.prob(&[a], a), 0.379_166_666_666_666_7));
        assert!(close(m.prob(&[a], b), 0.445_833_333_333_333_3));
        assert!(close(m.prob(&[a], EOS), 0.1125));
        assert!(close(m.prob(&[a], UNK), 0.0625));
    }

    #[test]
    fn unigram_identity() {
        let m = lm("a a a", 1, false);
        let a = m.word_id("a");
        assert!(close(m.prob(&[], a) + m.prob(&[], UNK), 1.0));
        assert!(close(m.prob(&[], a), 0.75));
        assert!(close(m.perplexity("a a a"), 1.0 / 0.75));
    }

    #[test]
    fn empty_text_is_infinite() {
        let m = lm("a a a", 1, false);
        assert_eq!(m.perplexity(""), f64::INFINITY);
        assert_eq!(m.perplexity("\n \n"), f64::INFINITY);
        assert!(matches!(NgramLm::train([" "], LmConfig::default()), Err(Error::EmptyCorpus)));
    }

    #[test]
    fn discount_formula() {
        // n1=10 n2=5 n3=3 n4=2: Y = 0.5
        let d = modified_kn_discounts([10, 5, 3, 2]);
        assert!(close(d[0], 0.5));
        assert!(close(d[1], 2.0 - 1.5 * 3.0 / 5.0));
        assert!(close(d[2], 3.0 - 2.0 * 2.0 / 3.0));
        assert_eq!(modified_kn_discounts([3, 0, 1, 1]), FALLBACK_DISCOUNTS);
    }

    #[test]
    fn distributions_normalize() {
        let text = "the cat sat on the mat\nthe dog sat on the log\nthe cat ate the fish\n\
a dog and a cat sat on a mat\nthe fish sat in the bowl";
        for boundaries in [false, true] {
            let m = NgramLm::train([text], LmConfig { order: 3, min_count: 1, boundaries }).unwrap();
            let support = m.support();
            let mut ctxs = m.top_contexts();
            ctxs.push(vec![]);
            ctxs.push(vec![m.word_id("the")]);
            for ctx in ctxs {
                let s: f64 = support.iter().map(|&w| m.prob(&ctx, w)).sum();
                assert!((s - 1.0).abs() < 1e-9, "{ctx:?} {s}");
            }
        }
    }

    #[test]
    fn save_load_round_trip() {
        let m = lm("x y z x y z x y\nz z y x", 3, true);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("lm.json");
        m.save(&path).unwrap();
        let back = NgramLm::load(&path).unwrap();
        for t in ["x y z", "z x q", ""] {
            assert_eq!(back.perplexity(t).to_bits(), m.perplexity(t).to_bits());
        }
    }
}
