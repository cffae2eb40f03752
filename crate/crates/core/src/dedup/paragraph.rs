//! Corpus-wide paragraph counting and removal of over-frequent paragraphs.

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::corpus::dedup_normalize;
use crate::hashing::hash64;
use crate::heuristics::segment::{paragraph_spans, word_count};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParagraphDedupConfig {
    /// `None` never removes anything.
    pub max_occurrences: Option<u32>,
    pub min_words: usize,
}

impl Default for ParagraphDedupConfig {
    fn default() -> Self {
        ParagraphDedupConfig { max_occurrences: Some(100), min_words: 50 }
    }
}

pub fn paragraph_key(paragraph: &str) -> u64 {
    hash64(dedup_normalize(paragraph).as_bytes(), 0x7061_7261)
}

/// Occurrence counts of normalized paragraphs. Counting is commutative, so
/// per-shard counters merge to the same totals in any order.
#[derive(Debug, Clone, Default)]
pub struct ParagraphCounter {
    counts: FxHashMap<u64, u32>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParagraphOutcome {
    Unchanged,
    Rewritten {
        text: String,
        removed: usize,
    },
    /// Too short after removal.
    Dropped {
        removed: usize,
    },
}

impl ParagraphCounter {
    pub fn add(&mut self, text: &str) {
        for r in paragraph_spans(text) {
            *self.counts.entry(paragraph_key(&text[r])).or_default() += 1;
        }
    }

    pub fn merge(&mut self, other: ParagraphCounter) {
        for (k, v) in other.counts {
            *self.counts.entry(k).or_default() += v;
        }
    }

    pub fn count(&self, paragraph: &str) -> u32 {
        self.counts.get(&paragraph_key(paragraph)).copied().unwrap_or(0)
    }

    /// Removes paragraphs seen more than `max_occurrences` times; kept
    /// paragraphs are rejoined with blank lines.
    pub fn filter(&self, text: &str, cfg: &ParagraphDedupConfig) -> ParagraphOutcome {
        let Some(max) = cfg.max_occurrences else {
            return ParagraphOutcome::Unchanged;
        };
        let spans = paragraph_spans(text);
        let kept: Vec<&str> = spans.iter().map(|r| &text[r.clone()]).filter(|p| self.count(p) <= max).collect();
        let removed = spans.len() - kept.len();
        if removed == 0 {
            return ParagraphOutcome::Unchanged;
        }
        let text = kept.join("\n\n");
        if kept.is_empty() || word_count(&text) < cfg.min_words {
            return ParagraphOutcome::Dropped { removed };
        }
        ParagraphOutcome::Rewritten { text, removed }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boilerplate_removed_everywhere() {
        let boiler = "Subscribe to our newsletter for updates.";
        let docs: Vec<String> = (0..30).map(|i| format!("Unique body number {i} with words.\n\n{boiler}")).collect();
        let mut c = ParagraphCounter::default();
        docs.iter().for_each(|d| c.add(d));
        let cfg = ParagraphDedupConfig { max_occurrences: Some(10), min_words: 1 };
        for (i, d) in docs.iter().enumerate() {
            assert_eq!(
                c.filter(d, &cfg),
                ParagraphOutcome::Rewritten { text: format!("Unique body number {i} with words."), removed: 1 }
            );
        }
        let strict = ParagraphDedupConfig { max_occurrences: Some(10), min_words: 50 };
        assert_eq!(c.filter(&docs[0], &strict), ParagraphOutcome::Dropped { removed: 1 });
        let off = ParagraphDedupConfig { max_occurrences: None, min_words: 50 };
        assert_eq!(c.filter(&docs[0], &off), ParagraphOutcome::Unchanged);
    }

    #[test]
    fn merge_matches_single_counter() {
        let texts = ["a\n\nb", "b\n\nc", "A\n\nb"];
        let mut whole = ParagraphCounter::default();
        texts.iter().for_each(|t| whole.add(t));
        let mut left = ParagraphCounter::default();
        left.add(texts[0]);
        let mut right = ParagraphCounter::default();
        right.add(texts[1]);
        right.add(texts[2]);
        left.merge(right);
        for p in ["a", "b", "c", "d"] {
            assert_eq!(left.count(p), whole.count(p));
        }
        assert_eq!(whole.count("a"), 2);
        assert_eq!(whole.count("b"), 3);
    }
}
