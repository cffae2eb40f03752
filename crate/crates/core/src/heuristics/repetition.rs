//! Repetition statistics over lines, paragraphs and word n-grams.

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use super::segment::{for_each_word, paragraph_spans};
use super::FilterVerdict;
use crate::corpus::{dedup_normalize, Document};

/// n values for the "most frequent n-gram" statistics.
pub const TOP_NGRAM_SIZES: [usize; 3] = [2, 3, 4];
/// n values for the "duplicated n-gram" statistics.
pub const DUP_NGRAM_SIZES: [usize; 6] = [5, 6, 7, 8, 9, 10];

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RepetitionStats {
    pub dup_line_frac: f64,
    pub dup_para_frac: f64,
    pub dup_line_char_frac: f64,
    pub dup_para_char_frac: f64,
    /// Indexed like [`TOP_NGRAM_SIZES`].
    pub top_ngram_char_frac: [f64; 3],
    /// Indexed like [`DUP_NGRAM_SIZES`].
    pub dup_ngram_char_frac: [f64; 6],
}

impl RepetitionStats {
    pub fn top_ngram(&self, n: usize) -> f64 {
        self.top_ngram_char_frac[n - 2]
    }

    pub fn dup_ngram(&self, n: usize) -> f64 {
        self.dup_ngram_char_frac[n - 5]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RepetitionThresholds {
    pub dup_line_frac: f64,
    pub dup_para_frac: f64,
    pub dup_line_char_frac: f64,
    pub dup_para_char_frac: f64,
    pub top_ngram_char_frac: [f64; 3],
    pub dup_ngram_char_frac: [f64; 6],
}

impl Default for RepetitionThresholds {
    fn default() -> Self {
        RepetitionThresholds {
            dup_line_frac: 0.30,
            dup_para_frac: 0.30,
            dup_line_char_frac: 0.20,
            dup_para_char_frac: 0.20,
            top_ngram_char_frac: [0.20, 0.18, 0.16],
            dup_ngram_char_frac: [0.15, 0.14, 0.13, 0.12, 0.11, 0.10],
        }
    }
}

impl RepetitionThresholds {
    pub(crate) fn fractions(&self) -> impl Iterator<Item = (&'static str, f64)> + '_ {
        [
            ("dup_line_frac", self.dup_line_frac),
            ("dup_para_frac", self.dup_para_frac),
            ("dup_line_char_frac", self.dup_line_char_frac),
            ("dup_para_char_frac", self.dup_para_char_frac),
        ]
        .into_iter()
        .chain(self.top_ngram_char_frac.iter().map(|&v| ("top_ngram_char_frac", v)))
        .chain(self.dup_ngram_char_frac.iter().map(|&v| ("dup_ngram_char_frac", v)))
    }
}

/// (fraction of units duplicated, fraction of characters in duplicated units)
fn unit_dup_fracs<'a>(units: impl Iterator<Item = &'a str>) -> (f64, f64) {
    let normalized: Vec<String> = units.filter(|u| !u.trim().is_empty()).map(dedup_normalize).collect();
    if normalized.is_empty() {
        return (0.0, 0.0);
    }
    let mut counts: FxHashMap<&str, u32> = FxHashMap::default();
    for u in &normalized {
        *counts.entry(u.as_str()).or_default() += 1;
    }
    let (mut dup_units, mut dup_chars, mut total_chars) = (0usize, 0usize, 0usize);
    for u in &normalized {
        let chars = u.chars().count();
        total_chars += chars;
        if counts[u.as_str()] > 1 {
            dup_units += 1;
            dup_chars += chars;
        }
    }
    let char_frac = if total_chars == 0 { 0.0 } else { dup_chars as f64 / total_chars as f64 };
    (dup_units as f64 / normalized.len() as f64, char_frac)
}

/// Word-level view of the dedup-normalized text, interned to ids.
struct WordSeq {
    ids: Vec<u32>,
    chars: Vec<usize>,
}

impl WordSeq {
    fn new(normalized: &str) -> Self {
        let mut interner: FxHashMap<&str, u32> = FxHashMap::default();
        let mut ids = Vec::new();
        let mut chars = Vec::new();
        for_each_word(normalized, |w| {
            let next = interner.len() as u32;
            ids.push(*interner.entry(w).or_insert(next));
            chars.push(if w.is_ascii() { w.len() } else { w.chars().count() });
        });
        WordSeq { ids, chars }
    }
}

/// Id of an n-gram known to occur once: its (n-1)-gram prefix does.
const UNIQUE: u32 = u32::MAX;

/// Dense ids for the n-grams of one size, built from the ids of the
/// previous size: gram n at position i is the pair (gram n-1 at i, word
/// i+n-1), so ids stay exact without hashing whole windows.
struct GramLevel {
    n: usize,
    ids: Vec<u32>,
    counts: Vec<u32>,
}

impl GramLevel {
    fn unigrams(seq: &WordSeq) -> Self {
        let vocab = seq.ids.iter().max().map_or(0, |&m| m as usize + 1);
        let mut counts = vec![0u32; vocab];
        for &id in &seq.ids {
            counts[id as usize] += 1;
        }
        GramLevel { n: 1, ids: seq.ids.clone(), counts }
    }

    fn extend(&self, seq: &WordSeq) -> Self {
        let n = self.n + 1;
        let len = seq.ids.len().saturating_sub(n - 1);
        let mut interner: FxHashMap<u64, u32> = FxHashMap::default();
        let mut ids = Vec::with_capacity(len);
        let mut counts: Vec<u32> = Vec::new();
        for i in 0..len {
            let prefix = self.ids[i];
            if prefix == UNIQUE || self.counts[prefix as usize] == 1 {
                ids.push(UNIQUE);
                continue;
            }
            let key = (prefix as u64) << 32 | seq.ids[i + n - 1] as u64;
            let next = interner.len() as u32;
            let id = *interner.entry(key).or_insert(next);
            if id == next {
                counts.push(0);
            }
            counts[id as usize] += 1;
            ids.push(id);
        }
        GramLevel { n, ids, counts }
    }

    /// count(most frequent n-gram) x chars(n-gram, single-spaced) over the
    /// single-spaced text. Ties prefer the longer n-gram. Zero when no
    /// n-gram repeats.
    fn top_frac(&self, seq: &WordSeq, total_spaced: usize) -> f64 {
        let n = self.n;
        if self.ids.is_empty() || total_spaced == 0 {
            return 0.0;
        }
        let mut best: (u32, usize) = (0, 0);
        for (i, &g) in self.ids.iter().enumerate() {
            let c = if g == UNIQUE { 1 } else { self.counts[g as usize] };
            if c < best.0 {
                continue;
            }
            let chars: usize = seq.chars[i..i + n].iter().sum::<usize>() + n - 1;
            if c > best.0 || chars > best.1 {
                best = (c, chars);
            }
        }
        if best.0 <= 1 {
            return 0.0;
        }
        ((best.0 as usize * best.1) as f64 / total_spaced as f64).min(1.0)
    }

    /// Marks every word covered by an n-gram occurrence whose n-gram occurs
    /// more than once. Returns `false` when nothing was marked.
    fn mark_dups(&self, covered: &mut [bool]) -> bool {
        let n = self.n;
        covered.iter_mut().for_each(|c| *c = false);
        let mut any = false;
        let mut covered_until = 0;
        for (i, &g) in self.ids.iter().enumerate() {
            if g != UNIQUE && self.counts[g as usize] > 1 {
                any = true;
                for c in covered.iter_mut().take(i + n).skip(covered_until.max(i)) {
                    *c = true;
                }
                covered_until = i + n;
            }
        }
        any
    }
}

pub fn repetition_stats(doc: &Document) -> RepetitionStats {
    repetition_stats_text(&doc.text)
}

pub fn repetition_stats_text(text: &str) -> RepetitionStats {
    let mut stats = RepetitionStats::default();
    (stats.dup_line_frac, stats.dup_line_char_frac) = unit_dup_fracs(text.split('\n'));
    (stats.dup_para_frac, stats.dup_para_char_frac) =
        unit_dup_fracs(paragraph_spans(text).into_iter().map(|r| &text[r]));

    let normalized = dedup_normalize(text);
    let seq = WordSeq::new(&normalized);
    if seq.ids.is_empty() {
        return stats;
    }
    let total_chars: usize = seq.chars.iter().sum();
    let total_spaced = total_chars + seq.ids.len() - 1;
    let mut level = GramLevel::unigrams(&seq);
    for (slot, &n) in TOP_NGRAM_SIZES.iter().enumerate() {
        while level.n < n {
            level = level.extend(&seq);
        }
        stats.top_ngram_char_frac[slot] = level.top_frac(&seq, total_spaced);
    }
    if total_chars == 0 {
        return stats;
    }
    let mut covered = vec![false; seq.ids.len()];
    for (slot, &n) in DUP_NGRAM_SIZES.iter().enumerate() {
        while level.n < n {
            level = level.extend(&seq);
        }
        // A repeated (n+1)-gram contains a repeated n-gram, so once nothing
        // repeats at size n nothing repeats at any larger size.
        if !level.mark_dups(&mut covered) {
            break;
        }
        let dup_chars: usize = covered.iter().zip(&seq.chars).filter(|(c, _)| **c).map(|(_, ch)| ch).sum();
        stats.dup_ngram_char_frac[slot] = dup_chars as f64 / total_chars as f64;
    }
    stats
}

/// Drops when any statistic strictly exceeds its threshold.
pub fn repetition_verdict(stats: &RepetitionStats, cfg: &RepetitionThresholds) -> FilterVerdict {
    let scalar = [
        ("dup_line_frac", stats.dup_line_frac, cfg.dup_line_frac),
        ("dup_para_frac", stats.dup_para_frac, cfg.dup_para_frac),
        ("dup_line_char_frac", stats.dup_line_char_frac, cfg.dup_line_char_frac),
        ("dup_para_char_frac", stats.dup_para_char_frac, cfg.dup_para_char_frac),
    ];
    for (rule, value, limit) in scalar {
        if value > limit {
            return FilterVerdict::drop(rule);
        }
    }
    for (slot, &n) in TOP_NGRAM_SIZES.iter().enumerate() {
        if stats.top_ngram_char_frac[slot] > cfg.top_ngram_char_frac[slot] {
            return FilterVerdict::drop(format!("top_{n}gram_char_frac"));
        }
    }
    for (slot, &n) in DUP_NGRAM_SIZES.iter().enumerate() {
        if stats.dup_ngram_char_frac[slot] > cfg.dup_ngram_char_frac[slot] {
            return FilterVerdict::drop(format!("dup_{n}gram_char_frac"));
        }
    }
    FilterVerdict::keep()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicated_lines() {
        let s = repetition_stats_text("x\nx\ny");
        assert!((s.dup_line_frac - 2.0 / 3.0).abs() < 1e-12);
        assert!((s.dup_line_char_frac - 2.0 / 3.0).abs() < 1e-12);
        // one paragraph only
        assert_eq!(s.dup_para_frac, 0.0);
    }

    #[test]
    fn top_trigram_example() {
        let s = repetition_stats_text("a b c a b c");
        assert!((s.top_ngram(3) - 10.0 / 11.0).abs() < 1e-12);
        // bigram "a b" x2 = 6 chars; "b c" also x2, same length
        assert!((s.top_ngram(2) - 6.0 / 11.0).abs() < 1e-12);
    }

    #[test]
    fn no_repeats_all_zero() {
        let text: Vec<String> = (0..200).map(|i| format!("w{i}")).collect();
        let s = repetition_stats_text(&text.join(" "));
        assert_eq!(s, RepetitionStats::default());
    }

    #[test]
    fn dup_ngrams_cover_words() {
        // "a b c d e" twice: all 10 words covered at n=5
        let s = repetition_stats_text("a b c d e a b c d e");
        assert_eq!(s.dup_ngram(5), 1.0);
        assert_eq!(s.dup_ngram(6), 0.0);
    }

    #[test]
    fn verdict_tie_keeps() {
        let cfg = RepetitionThresholds::default();
        let mut s = RepetitionStats::default();
        assert!(repetition_verdict(&s, &cfg).keep);
        s.dup_para_frac = 0.30;
        assert!(repetition_verdict(&s, &cfg).keep);
        s.dup_para_frac = 0.5;
        let v = repetition_verdict(&s, &cfg);
        assert!(!v.keep);
        assert_eq!(v.rule_id, "dup_para_frac");
        s.dup_para_frac = 0.0;
        s.dup_ngram_char_frac[5] = 0.2;
        assert_eq!(repetition_verdict(&s, &cfg).rule_id, "dup_10gram_char_frac");
    }
}
