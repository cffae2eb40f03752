//! Byte-pair-encoding tokenizer with digit splitting, byte fallback, no
//! dummy prefix and no normalization.

mod corpus_io;
mod pretokenize;
mod train;

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::path::Path;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

pub use corpus_io::{read_token_corpus, TokenCorpusReader, TokenCorpusWriter};
pub use pretokenize::{is_decimal_digit, pretokenize};
pub use train::train_bpe;

use crate::error::{Error, Result};
use crate::modelfile;

pub const UNK_ID: u32 = 0;
pub const BOS_ID: u32 = 1;
pub const EOS_ID: u32 = 2;
pub const PAD_ID: u32 = 3;
pub const BYTE_BASE: u32 = 4;
/// First id after the specials and the 256 byte tokens.
pub const FIRST_PIECE_ID: u32 = BYTE_BASE + 256;
pub const SPECIALS: [&str; 4] = ["<unk>", "<s>", "</s>", "<pad>"];
pub const DEFAULT_VOCAB_SIZE: usize = 64_000;

const MAGIC: &str = "curate-bpe";
const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TokenizerConfig {
    pub vocab_size: usize,
    pub split_digits: bool,
    pub byte_fallback: bool,
    pub dummy_prefix: bool,
    /// Fraction of character occurrences that get a token of their own;
    /// the rest are only reachable through byte fallback.
    pub character_coverage: f64,
    /// Pairs seen fewer times than this are never merged.
    pub min_pair_count: u64,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        TokenizerConfig {
            vocab_size: DEFAULT_VOCAB_SIZE,
            split_digits: true,
            byte_fallback: true,
            dummy_prefix: false,
            character_coverage: 0.9995,
            min_pair_count: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tokenizer {
    pub config: TokenizerConfig,
    /// Strings of ids >= FIRST_PIECE_ID: single characters, then merges.
    pieces: Vec<String>,
    piece_index: FxHashMap<String, u32>,
    /// (left, right, result) in learned order.
    merges: Vec<(u32, u32, u32)>,
    merge_rank: FxHashMap<(u32, u32), (u32, u32)>,
    char_ids: FxHashMap<char, u32>,
}

impl Tokenizer {
    fn from_parts(config: TokenizerConfig, pieces: Vec<String>, merges: Vec<(u32, u32, u32)>) -> Result<Self> {
        let mut piece_index = FxHashMap::default();
        let mut char_ids = FxHashMap::default();
        for (i, p) in pieces.iter().enumerate() {
            let id = FIRST_PIECE_ID + i as u32;
            if piece_index.insert(p.clone(), id).is_some() {
                return Err(Error::Invalid(format!("duplicate vocabulary piece {p:?}")));
            }
            let mut chars = p.chars();
            if let (Some(c), None) = (chars.next(), chars.next()) {
                char_ids.insert(c, id);
            }
        }
        let limit = FIRST_PIECE_ID + pieces.len() as u32;
        let mut merge_rank = FxHashMap::default();
        for (rank, &(a, b, r)) in merges.iter().enumerate() {
            if a < FIRST_PIECE_ID || b < FIRST_PIECE_ID || r < FIRST_PIECE_ID || a >= limit || b >= limit || r >= limit
            {
                return Err(Error::Invalid(format!("merge {rank} references an unknown piece")));
            }
            let joined = format!("{}{}", pieces[(a - FIRST_PIECE_ID) as usize], pieces[(b - FIRST_PIECE_ID) as usize]);
            if joined != pieces[(r - FIRST_PIECE_ID) as usize] {
                return Err(Error::Invalid(format!("merge {rank} result does not match its parts")));
            }
            merge_rank.entry((a, b)).or_insert((rank as u32, r));
        }
        Ok(Tokenizer { config, pieces, piece_index, merges, merge_rank, char_ids })
    }

    pub fn vocab_size(&self) -> usize {
        FIRST_PIECE_ID as usize + self.pieces.len()
    }

    pub fn merges(&self) -> &[(u32, u32, u32)] {
        &self.merges
    }

    pub fn piece_id(&self, piece: &str) -> Option<u32> {
        self.piece_index.get(piece).copied()
    }

    /// Display form: specials by name, byte tokens as "<0xAB>", others as
    /// their text.
    pub fn token_str(&self, id: u32) -> Result<String> {
        match id {
            0..=3 => Ok(SPECIALS[id as usize].to_string()),
            _ if id < FIRST_PIECE_ID => Ok(format!("<0x{:02X}>", id - BYTE_BASE)),
            _ => self.pieces.get((id - FIRST_PIECE_ID) as usize).cloned().ok_or(Error::UnknownId(id)),
        }
    }

    /// Bytes a token contributes to decoded text; empty for specials.
    pub fn token_bytes(&self, id: u32) -> Result<Vec<u8>> {
        match id {
            0..=3 => Ok(Vec::new()),
            _ if id < FIRST_PIECE_ID => Ok(vec![(id - BYTE_BASE) as u8]),
            _ => self
                .pieces
                .get((id - FIRST_PIECE_ID) as usize)
                .map(|p| p.as_bytes().to_vec())
                .ok_or(Error::UnknownId(id)),
        }
    }

    /// Initial symbols of one piece: character tokens, or the UTF-8 bytes
    /// of characters without one.
    fn initial_symbols(&self, piece: &str, out: &mut Vec<u32>) {
        for c in piece.chars() {
            match self.char_ids.get(&c) {
                Some(&id) => out.push(id),
                None if self.config.byte_fallback => {
                    let mut buf = [0u8; 4];
                    out.extend(c.encode_utf8(&mut buf).bytes().map(|b| BYTE_BASE + b as u32));
                }
                None => out.push(UNK_ID),
            }
        }
    }

    /// Repeatedly merges the lowest-ranked adjacent pair (leftmost first),
    /// never going back to a rank below the last one applied; this equals
    /// applying the merge list in order.
    fn merge_symbols(&self, syms: &mut Vec<u32>) {
        let n = syms.len();
        if n < 2 || self.merges.is_empty() {
            return;
        }
        let mut next: Vec<usize> = (1..=n).collect();
        let mut prev: Vec<usize> = (0..n).map(|i| i.wrapping_sub(1)).collect();
        let mut alive = vec![true; n];
        let mut heap: BinaryHeap<Reverse<(u32, usize, u32, u32)>> = BinaryHeap::new();
        let push = |heap: &mut BinaryHeap<_>, syms: &Vec<u32>, i: usize, j: usize| {
            if let Some(&(rank, _)) = self.merge_rank.get(&(syms[i], syms[j])) {
                heap.push(Reverse((rank, i, syms[i], syms[j])));
            }
        };
        for i in 0..n - 1 {
            push(&mut heap, syms, i, i + 1);
        }
        let mut floor = 0u32;
        while let Some(Reverse((rank, i, a, b))) = heap.pop() {
            let j = next[i];
            if rank < floor || !alive[i] || j >= n || syms[i] != a || syms[j] != b {
                continue;
            }
            floor = rank;
            syms[i] = self.merge_rank[&(a, b)].1;
            alive[j] = false;
            next[i] = next[j];
            if next[i] < n {
                prev[next[i]] = i;
            }
            if prev[i] != usize::MAX {
                push(&mut heap, syms, prev[i], i);
            }
            if next[i] < n {
                push(&mut heap, syms, i, next[i]);
            }
        }
        let mut w = 0;
        for r in 0..n {
            if alive[r] {
                syms[w] = syms[r];
                w += 1;
            }
        }
        syms.truncate(w);
    }

    pub fn encode_piece(&self, piece: &str, out: &mut Vec<u32>) {
        let mut syms = Vec::with_capacity(piece.len());
        self.initial_symbols(piece, &mut syms);
        self.merge_symbols(&mut syms);
        out.extend_from_slice(&syms);
    }

    pub fn encode(&self, text: &str) -> Vec<u32> {
        let prefixed;
        let text = if self.config.dummy_prefix && !text.is_empty() {
            prefixed = format!(" {text}");
            prefixed.as_str()
        } else {
            text
        };
        let mut out = Vec::with_capacity(text.len() / 3 + 1);
        for piece in pretokenize(text, self.config.split_digits) {
            self.encode_piece(piece, &mut out);
        }
        out
    }

    /// Concatenates token bytes, skipping specials; invalid UTF-8 from
    /// arbitrary byte sequences is replaced.
    pub fn decode(&self, ids: &[u32]) -> Result<String> {
        let mut bytes = Vec::with_capacity(ids.len() * 3);
        for &id in ids {
            match id {
                0..=3 => {}
                _ if id < FIRST_PIECE_ID => bytes.push((id - BYTE_BASE) as u8),
                _ => bytes.extend_from_slice(
                    self.pieces.get((id - FIRST_PIECE_ID) as usize).ok_or(Error::UnknownId(id))?.as_bytes(),
                ),
            }
        }
        let text = String::from_utf8(bytes).unwrap_or_else(|e| String::from_utf8_lossy(e.as_bytes()).into_owned());
        Ok(match (self.config.dummy_prefix, text.strip_prefix(' ')) {
            (true, Some(rest)) => rest.to_string(),
            _ => text,
        })
    }

    /// Slow reference: applies each merge rule in list order to every
    /// piece, left to right.
    pub fn encode_reference(&self, text: &str) -> Vec<u32> {
        let mut out = Vec::new();
        for piece in pretokenize(text, self.config.split_digits) {
            let mut syms = Vec::new();
            self.initial_symbols(piece, &mut syms);
            for &(a, b, r) in &self.merges {
                let mut merged = Vec::with_capacity(syms.len());
                let mut i = 0;
                while i < syms.len() {
                    if i + 1 < syms.len() && syms[i] == a && syms[i + 1] == b {
                        merged.push(r);
                        i += 2;
                    } else {
                        merged.push(syms[i]);
                        i += 1;
                    }
                }
                syms = merged;
            }
            out.extend(syms);
        }
        out
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file =
            TokenizerFile { config: self.config.clone(), pieces: self.pieces.clone(), merges: self.merges.clone() };
        modelfile::save(path, MAGIC, VERSION, &file)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let f: TokenizerFile = modelfile::load(path, MAGIC, VERSION)?;
        Tokenizer::from_parts(f.config, f.pieces, f.merges).map_err(|e| Error::model(path, e.to_string()))
    }
}

#[derive(Serialize, Deserialize)]
struct TokenizerFile {
    config: TokenizerConfig,
    pieces: Vec<String>,
    merges: Vec<(u32, u32, u32)>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tok() -> Tokenizer {
        let corpus = ["the cat sat on the mat", "the dog ate the bone in 2023", "模型 训练 模型 数据"];
        train_bpe(corpus.iter().copied(), &TokenizerConfig { vocab_size: 400, ..Default::default() }).unwrap()
    }

    #[test]
    fn round_trips() {
        let t = tok();
        for s in ["Yi-34B 模型 2023 🚀", "", "  leading", "trailing  ", "é", "a\n\nb\tc"] {
            assert_eq!(t.decode(&t.encode(s)).unwrap(), s);
        }
        assert!(t.encode("").is_empty());
    }

    #[test]
    fn digits_stay_single() {
        let t = tok();
        let ids = t.encode("2023");
        assert_eq!(ids.len(), 4);
        for id in ids {
            let b = t.token_bytes(id).unwrap();
            assert_eq!(b.len(), 1);
        }
    }

    #[test]
    fn unseen_char_uses_bytes() {
        let t = tok();
        let ids = t.encode("🚀");
        assert_eq!(ids, "🚀".bytes().map(|b| BYTE_BASE + b as u32).collect::<Vec<_>>());
        let e: Vec<u32> = "é".bytes().map(|b| BYTE_BASE + b as u32).collect();
        assert_eq!(t.decode(&e).unwrap(), "é");
        assert_eq!(t.token_str(e[0]).unwrap(), "<0xC3>");
    }

    #[test]
    fn no_dummy_prefix() {
        let t = tok();
        let first = t.encode("the")[0];
        assert!(!t.token_str(first).unwrap().starts_with(' '));
    }

    #[test]
    fn unknown_id() {
        let t = tok();
        assert!(matches!(t.decode(&[99_999]), Err(Error::UnknownId(99_999))));
        assert_eq!(t.decode(&[BOS_ID, EOS_ID, PAD_ID]).unwrap(), "");
    }

    #[test]
    fn fast_encode_matches_reference() {
        let t = tok();
        for s in ["the cat ate the mat", "thethethe  the", "模型训练数据 2023 the bone"] {
            assert_eq!(t.encode(s), t.encode_reference(s), "{s}");
        }
    }

    #[test]
    fn save_load() {
        let t = tok();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("tok.json");
        t.save(&p).unwrap();
        assert_eq!(Tokenizer::load(&p).unwrap(), t);
    }
}
