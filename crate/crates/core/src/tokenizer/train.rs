//! Greedy BPE merge learning.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rustc_hash::FxHashMap;

use super::{pretokenize, Tokenizer, TokenizerConfig, FIRST_PIECE_ID};
use crate::error::{Error, Result};

/// Marks characters without a token of their own; never part of a pair.
const BLOCKED: u32 = u32::MAX;

type Pair = (u32, u32);

struct Word {
    syms: Vec<u32>,
    freq: i64,
}

fn pairs_of(syms: &[u32]) -> impl Iterator<Item = Pair> + '_ {
    syms.windows(2).map(|w| (w[0], w[1])).filter(|&(a, b)| a != BLOCKED && b != BLOCKED)
}

/// (count, reversed piece texts for tie-breaking, left id, right id)
type HeapEntry = (i64, Reverse<(String, String)>, u32, u32);

/// Learns a vocabulary of `vocab_size` ids: 4 specials, 256 byte tokens,
/// the most frequent characters, then merges. Each step merges the most
/// frequent adjacent pair inside a piece; ties go to the lexicographically
/// smallest (left, right) pair of strings.
pub fn train_bpe<'a, I>(texts: I, cfg: &TokenizerConfig) -> Result<Tokenizer>
where
    I: IntoIterator<Item = &'a str>,
{
    let minimum = FIRST_PIECE_ID as usize;
    if cfg.vocab_size < minimum {
        return Err(Error::VocabTooSmall { requested: cfg.vocab_size, minimum });
    }
    let budget = cfg.vocab_size - minimum;

    let mut piece_freq: FxHashMap<String, i64> = FxHashMap::default();
    for text in texts {
        let prefixed;
        let text = if cfg.dummy_prefix && !text.is_empty() {
            prefixed = format!(" {text}");
            prefixed.as_str()
        } else {
            text
        };
        for p in pretokenize(text, cfg.split_digits) {
            match piece_freq.get_mut(p) {
                Some(f) => *f += 1,
                None => {
                    piece_freq.insert(p.to_string(), 1);
                }
            }
        }
    }
    if piece_freq.is_empty() {
        return Err(Error::EmptyCorpus);
    }

    let mut char_freq: FxHashMap<char, i64> = FxHashMap::default();
    for (p, &f) in &piece_freq {
        for c in p.chars() {
            *char_freq.entry(c).or_default() += f;
        }
    }
    let mut chars: Vec<(char, i64)> = char_freq.into_iter().collect();
    chars.sort_unstable_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let total: i64 = chars.iter().map(|c| c.1).sum();
    let mut pieces: Vec<String> = Vec::new();
    let mut covered = 0i64;
    for &(c, f) in &chars {
        if pieces.len() >= budget {
            break;
        }
        if cfg.byte_fallback && covered as f64 >= cfg.character_coverage * total as f64 {
            break;
        }
        pieces.push(c.to_string());
        covered += f;
    }
    let char_ids: FxHashMap<char, u32> = pieces
        .iter()
        .enumerate()
        .map(|(i, p)| (p.chars().next().unwrap_or_default(), FIRST_PIECE_ID + i as u32))
        .collect();
    let mut piece_index: FxHashMap<String, u32> =
        pieces.iter().enumerate().map(|(i, p)| (p.clone(), FIRST_PIECE_ID + i as u32)).collect();

    let mut sorted: Vec<(String, i64)> = piece_freq.into_iter().collect();
    sorted.sort_unstable();
    let mut words: Vec<Word> = sorted
        .into_iter()
        .map(|(p, freq)| Word { syms: p.chars().map(|c| char_ids.get(&c).copied().unwrap_or(BLOCKED)).collect(), freq })
        .collect();

    let mut counts: FxHashMap<Pair, i64> = FxHashMap::default();
    let mut locations: FxHashMap<Pair, Vec<u32>> = FxHashMap::default();
    for (wi, w) in words.iter().enumerate() {
        for pair in pairs_of(&w.syms) {
            *counts.entry(pair).or_default() += w.freq;
            let loc = locations.entry(pair).or_default();
            if loc.last() != Some(&(wi as u32)) {
                loc.push(wi as u32);
            }
        }
    }
    let text_of = |pieces: &Vec<String>, id: u32| pieces[(id - FIRST_PIECE_ID) as usize].clone();
    let mut heap: BinaryHeap<HeapEntry> =
        counts.iter().map(|(&(a, b), &c)| (c, Reverse((text_of(&pieces, a), text_of(&pieces, b))), a, b)).collect();

    let mut merges: Vec<(u32, u32, u32)> = Vec::new();
    let min_count = cfg.min_pair_count.max(1) as i64;
    while pieces.len() < budget {
        let Some((count, Reverse((ls, rs)), a, b)) = heap.pop() else {
            break;
        };
        if counts.get(&(a, b)) != Some(&count) {
            continue;
        }
        if count < min_count {
            break;
        }
        let merged = format!("{ls}{rs}");
        let id = match piece_index.get(&merged) {
            Some(&id) => id,
            None => {
                let id = FIRST_PIECE_ID + pieces.len() as u32;
                pieces.push(merged.clone());
                piece_index.insert(merged, id);
                id
            }
        };
        merges.push((a, b, id));
        counts.remove(&(a, b));

        let mut touched: FxHashMap<Pair, i64> = FxHashMap::default();
        for wi in locations.remove(&(a, b)).unwrap_or_default() {
            let w = &mut words[wi as usize];
            if !w.syms.windows(2).any(|p| p[0] == a && p[1] == b) {
                continue;
            }
            for pair in pairs_of(&w.syms) {
                *touched.entry(pair).or_default() -= w.freq;
            }
            let mut out = Vec::with_capacity(w.syms.len());
            let mut i = 0;
            while i < w.syms.len() {
                if i + 1 < w.syms.len() && w.syms[i] == a && w.syms[i + 1] == b {
                    out.push(id);
                    i += 2;
                } else {
                    out.push(w.syms[i]);
                    i += 1;
                }
            }
            w.syms = out;
            for pair in pairs_of(&w.syms) {
                *touched.entry(pair).or_default() += w.freq;
                if pair.0 == id || pair.1 == id {
                    let loc = locations.entry(pair).or_default();
                    if loc.last() != Some(&wi) {
                        loc.push(wi);
                    }
                }
            }
        }
        let mut changed: Vec<(Pair, i64)> = touched.into_iter().filter(|&(p, d)| d != 0 && p != (a, b)).collect();
        changed.sort_unstable();
        for (pair, delta) in changed {
            let c = counts.entry(pair).or_default();
            *c += delta;
            let c = *c;
            if c <= 0 {
                counts.remove(&pair);
            } else {
                heap.push((c, Reverse((text_of(&pieces, pair.0), text_of(&pieces, pair.1))), pair.0, pair.1));
            }
        }
    }
    Tokenizer::from_parts(cfg.clone(), pieces, merges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tokenizer::is_decimal_digit;

    fn cfg(vocab_size: usize) -> TokenizerConfig {
        TokenizerConfig { vocab_size, min_pair_count: 1, ..Default::default() }
    }

    #[test]
    fn first_merge_is_most_frequent_pair() {
        let t = train_bpe(["abababab"], &cfg(263)).unwrap();
        let (a, b, r) = t.merges()[0];
        assert_eq!(t.token_str(a).unwrap(), "a");
        assert_eq!(t.token_str(b).unwrap(), "b");
        assert_eq!(t.token_str(r).unwrap(), "ab");
    }

    #[test]
    fn lexicographic_tie_break() {
        // (" ",c), (c,d) and (x,y) all occur twice
        let t = train_bpe(["xy xy cd cd"], &cfg(270)).unwrap();
        let (a, b, _) = t.merges()[0];
        assert_eq!((t.token_str(a).unwrap(), t.token_str(b).unwrap()), (" ".to_string(), "c".to_string()));
    }

    #[test]
    fn minimum_vocab_is_pure_bytes() {
        let t = train_bpe(["hello world"], &cfg(260)).unwrap();
        assert!(t.merges().is_empty());
        assert_eq!(t.vocab_size(), 260);
        assert_eq!(t.encode("hi").len(), 2);
        assert_eq!(t.decode(&t.encode("hello 🚀")).unwrap(), "hello 🚀");
        assert!(matches!(train_bpe(["x"], &cfg(259)), Err(Error::VocabTooSmall { .. })));
        assert!(matches!(train_bpe([""], &cfg(300)), Err(Error::EmptyCorpus)));
    }

    #[test]
    fn digits_never_merge() {
        let corpus = vec!["2023"; 1000];
        let t = train_bpe(corpus.iter().copied(), &cfg(400)).unwrap();
        for id in 0..t.vocab_size() as u32 {
            let s = String::from_utf8_lossy(&t.token_bytes(id).unwrap()).into_owned();
            assert!(s.chars().filter(|&c| is_decimal_digit(c)).count() <= 1, "{s:?}");
        }
        assert_eq!(t.encode("2023").len(), 4);
    }

    #[test]
    fn deterministic_and_reproduces_training_segmentation() {
        let corpus = ["low lower lowest", "newer newest wider", "low low low new new"];
        let a = train_bpe(corpus, &cfg(300)).unwrap();
        let b = train_bpe(corpus, &cfg(300)).unwrap();
        assert_eq!(a, b);
        for s in corpus {
            assert_eq!(a.encode(s), a.encode_reference(s));
        }
    }
}
