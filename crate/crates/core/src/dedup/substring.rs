//! Sub-document exact-match dedup over token windows.

use std::ops::Range;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::hashing::hash64;
use crate::heuristics::segment::{word_count, word_spans};

pub const DEFAULT_WINDOW: usize = 50;
const ROLL_BASE: u64 = 0x100_0000_01b3;
const TOKEN_SEED: u64 = 0x7375_6273;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SubstringConfig {
    /// Window length in tokens.
    pub window: usize,
    pub min_words: usize,
}

impl Default for SubstringConfig {
    fn default() -> Self {
        SubstringConfig { window: DEFAULT_WINDOW, min_words: 50 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SubstringOutcome {
    Unchanged,
    Rewritten {
        text: String,
        excised_bytes: usize,
    },
    /// Too short after excision.
    Dropped {
        excised_bytes: usize,
    },
}

struct Tokenized<'a> {
    text: &'a str,
    spans: Vec<Range<usize>>,
}

impl Tokenized<'_> {
    fn token(&self, i: usize) -> &str {
        &self.text[self.spans[i].clone()]
    }
}

/// Polynomial rolling hashes of every `w`-token window.
fn window_hashes(t: &Tokenized, w: usize) -> Vec<u64> {
    let n = t.spans.len();
    if n < w {
        return Vec::new();
    }
    let th: Vec<u64> = (0..n).map(|i| hash64(t.token(i).as_bytes(), TOKEN_SEED)).collect();
    let top = (1..w).fold(1u64, |p, _| p.wrapping_mul(ROLL_BASE));
    let mut h = th[..w].iter().fold(0u64, |h, &x| h.wrapping_mul(ROLL_BASE).wrapping_add(x));
    let mut out = Vec::with_capacity(n - w + 1);
    out.push(h);
    for i in w..n {
        h = h.wrapping_sub(th[i - w].wrapping_mul(top)).wrapping_mul(ROLL_BASE).wrapping_add(th[i]);
        out.push(h);
    }
    out
}

/// Per-document token marks (input order): a token is marked when it lies
/// in a `window`-token window whose exact token sequence already occurred
/// at an earlier (document id, position). Tokens follow the word rule on
/// the raw text.
pub fn substring_marks(docs: &[(&str, &str)], window: usize) -> Vec<Vec<bool>> {
    let window = window.max(1);
    let mut order: Vec<usize> = (0..docs.len()).collect();
    order.sort_by(|&a, &b| docs[a].0.cmp(docs[b].0));
    let toks: Vec<Tokenized> =
        order.par_iter().map(|&i| Tokenized { text: docs[i].1, spans: word_spans(docs[i].1) }).collect();
    let hashes: Vec<Vec<u64>> = toks.par_iter().map(|t| window_hashes(t, window)).collect();
    let mut entries: Vec<(u64, u32, u32)> = hashes
        .iter()
        .enumerate()
        .flat_map(|(rank, hs)| hs.iter().enumerate().map(move |(p, &h)| (h, rank as u32, p as u32)))
        .collect();
    entries.par_sort_unstable();

    let same = |a: (u32, u32), b: (u32, u32)| {
        let (ta, tb) = (&toks[a.0 as usize], &toks[b.0 as usize]);
        (0..window).all(|k| ta.token(a.1 as usize + k) == tb.token(b.1 as usize + k))
    };
    let mut later: Vec<(u32, u32)> = Vec::new();
    let mut g = 0;
    while g < entries.len() {
        let mut e = g + 1;
        while e < entries.len() && entries[e].0 == entries[g].0 {
            e += 1;
        }
        if e - g > 1 {
            // distinct windows sharing a hash each keep their first occurrence
            let mut firsts: Vec<(u32, u32)> = vec![(entries[g].1, entries[g].2)];
            for &(_, r, p) in &entries[g + 1..e] {
                if firsts.iter().any(|&f| same(f, (r, p))) {
                    later.push((r, p));
                } else {
                    firsts.push((r, p));
                }
            }
        }
        g = e;
    }

    let mut marks_by_rank: Vec<Vec<bool>> = toks.iter().map(|t| vec![false; t.spans.len()]).collect();
    for (r, p) in later {
        let m = &mut marks_by_rank[r as usize];
        m[p as usize..p as usize + window].iter_mut().for_each(|x| *x = true);
    }
    let mut marks = vec![Vec::new(); docs.len()];
    for (rank, &i) in order.iter().enumerate() {
        marks[i] = std::mem::take(&mut marks_by_rank[rank]);
    }
    marks
}

/// Removes every maximal run of marked tokens together with the whitespace
/// that follows it (or, at the end of the text, precedes it).
pub fn excise(text: &str, marks: &[bool]) -> (String, usize) {
    let spans = word_spans(text);
    debug_assert_eq!(spans.len(), marks.len());
    let mut out = String::with_capacity(text.len());
    let mut copied = 0;
    let mut i = 0;
    while i < marks.len() {
        if !marks[i] {
            i += 1;
            continue;
        }
        let a = i;
        while i < marks.len() && marks[i] {
            i += 1;
        }
        let (start, end) = if i < marks.len() {
            (spans[a].start, spans[i].start)
        } else if a > 0 {
            (spans[a - 1].end, text.len())
        } else {
            (0, text.len())
        };
        let start = start.max(copied);
        out.push_str(&text[copied..start]);
        copied = end;
    }
    out.push_str(&text[copied..]);
    let removed = text.len() - out.len();
    (out, removed)
}

pub fn substring_dedup(docs: &[(&str, &str)], cfg: &SubstringConfig) -> Vec<SubstringOutcome> {
    let marks = substring_marks(docs, cfg.window);
    docs.par_iter()
        .zip(marks.par_iter())
        .map(|(d, m)| {
            if !m.iter().any(|&x| x) {
                return SubstringOutcome::Unchanged;
            }
            let (text, excised_bytes) = excise(d.1, m);
            if word_count(&text) < cfg.min_words {
                SubstringOutcome::Dropped { excised_bytes }
            } else {
                SubstringOutcome::Rewritten { text, excised_bytes }
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn words(prefix: &str, n: usize) -> String {
        (0..n).map(|i| format!("{prefix}{i}")).collect::<Vec<_>>().join(" ")
    }

    #[test]
    fn shared_passage_excised_from_later_doc() {
        let passage = words("p", 200);
        let a = format!("{} {} {}", words("a", 60), passage, words("aa", 60));
        let b = format!("{} {} {}", words("b", 60), passage, words("bb", 60));
        let docs = [("doc-b", b.as_str()), ("doc-a", a.as_str())];
        let out = substring_dedup(&docs, &SubstringConfig::default());
        assert_eq!(out[1], SubstringOutcome::Unchanged);
        match &out[0] {
            SubstringOutcome::Rewritten { text, .. } => {
                assert_eq!(text, &format!("{} {}", words("b", 60), words("bb", 60)));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn no_repeats_unchanged() {
        let a = words("a", 120);
        let b = words("b", 120);
        let out = substring_dedup(&[("a", a.as_str()), ("b", b.as_str())], &SubstringConfig::default());
        assert!(out.iter().all(|o| *o == SubstringOutcome::Unchanged));
    }

    #[test]
    fn short_remainder_dropped() {
        let passage = words("p", 80);
        let b = format!("{passage} tail");
        let out = substring_dedup(&[("a", passage.as_str()), ("b", b.as_str())], &SubstringConfig::default());
        assert!(matches!(out[1], SubstringOutcome::Dropped { .. }));
    }

    #[test]
    fn excise_edges() {
        assert_eq!(excise("a b c d", &[false, true, true, false]), ("a d".to_string(), 4));
        assert_eq!(excise("a b c", &[false, false, true]), ("a b".to_string(), 2));
        assert_eq!(excise("a b c", &[true, false, false]), ("b c".to_string(), 2));
        assert_eq!(excise("a b", &[true, true]), (String::new(), 3));
    }

    #[test]
    fn repeat_within_one_document() {
        let passage = words("p", 60);
        let doc = format!("{passage} middle words {passage}");
        let m = substring_marks(&[("x", doc.as_str())], 50);
        let marked = m[0].iter().filter(|&&x| x).count();
        assert_eq!(marked, 60);
        assert!(m[0][..62].iter().all(|&x| !x));
    }
}
