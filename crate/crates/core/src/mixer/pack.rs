//! Fixed-length sequence packing with separator tokens.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hashing::hash64;
use crate::tokenizer::{EOS_ID, PAD_ID};

const MAGIC: &[u8; 8] = b"CURPACK1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Span {
    pub doc_id: String,
    /// Offset of the chunk within its document.
    pub doc_offset: u32,
    pub length: u32,
    /// Offset of the chunk within the sequence.
    pub position: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PackedSequence {
    pub tokens: Vec<u32>,
    pub spans: Vec<Span>,
    /// Trailing padding tokens.
    pub padded: u32,
}

impl PackedSequence {
    pub fn separator_positions(&self) -> Vec<u32> {
        self.spans.iter().map(|s| s.position + s.length).collect()
    }
}

/// Greedy packer: every chunk is followed by a separator; a document that
/// does not fit continues in the next sequence; a sequence with a single
/// free slot is padded and closed.
pub struct Packer {
    seq_len: usize,
    current: PackedSequence,
    done: Vec<PackedSequence>,
}

impl Packer {
    pub fn new(seq_len: usize) -> Result<Self> {
        if seq_len < 2 {
            return Err(Error::Invalid("seq_len must be at least 2".into()));
        }
        Ok(Packer {
            seq_len,
            current: PackedSequence { tokens: Vec::with_capacity(seq_len), spans: Vec::new(), padded: 0 },
            done: Vec::new(),
        })
    }

    fn close(&mut self) {
        let pad = self.seq_len - self.current.tokens.len();
        self.current.tokens.resize(self.seq_len, PAD_ID);
        self.current.padded = pad as u32;
        let next = PackedSequence { tokens: Vec::with_capacity(self.seq_len), spans: Vec::new(), padded: 0 };
        self.done.push(std::mem::replace(&mut self.current, next));
    }

    pub fn push(&mut self, doc_id: &str, tokens: &[u32]) {
        let mut offset = 0;
        while offset < tokens.len() {
            let avail = self.seq_len - self.current.tokens.len();
            if avail < 2 {
                self.close();
                continue;
            }
            let take = (tokens.len() - offset).min(avail - 1);
            self.current.spans.push(Span {
                doc_id: doc_id.to_string(),
                doc_offset: offset as u32,
                length: take as u32,
                position: self.current.tokens.len() as u32,
            });
            self.current.tokens.extend_from_slice(&tokens[offset..offset + take]);
            self.current.tokens.push(EOS_ID);
            offset += take;
            if self.current.tokens.len() == self.seq_len {
                self.close();
            }
        }
    }

    pub fn finish(mut self) -> Vec<PackedSequence> {
        if !self.current.tokens.is_empty() {
            self.close();
        }
        self.done
    }
}

/// Packs documents in input order, or in hash(id, seed) order when a seed
/// is given.
pub fn pack_sequences(docs: &[(String, Vec<u32>)], seq_len: usize, seed: Option<u64>) -> Result<Vec<PackedSequence>> {
    let mut order: Vec<usize> = (0..docs.len()).collect();
    if let Some(seed) = seed {
        order.sort_by_key(|&i| (hash64(docs[i].0.as_bytes(), seed), i));
    }
    let mut packer = Packer::new(seq_len)?;
    for i in order {
        packer.push(&docs[i].0, &docs[i].1);
    }
    Ok(packer.finish())
}

pub fn write_packed(path: &Path, seq_len: usize, seqs: &[PackedSequence]) -> Result<()> {
    let io = |e| Error::io(path, e);
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    let mut buf: Vec<u8> = Vec::new();
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&(seq_len as u32).to_le_bytes());
    buf.extend_from_slice(&(seqs.len() as u64).to_le_bytes());
    for s in seqs {
        for t in &s.tokens {
            buf.extend_from_slice(&t.to_le_bytes());
        }
        buf.extend_from_slice(&s.padded.to_le_bytes());
        buf.extend_from_slice(&(s.spans.len() as u32).to_le_bytes());
        for sp in &s.spans {
            buf.extend_from_slice(&(sp.doc_id.len() as u32).to_le_bytes());
            buf.extend_from_slice(sp.doc_id.as_bytes());
            for v in [sp.doc_offset, sp.length, sp.position] {
                buf.extend_from_slice(&v.to_le_bytes());
            }
        }
        w.write_all(&buf).map_err(io)?;
        buf.clear();
    }
    w.flush().map_err(io)
}

pub fn read_packed(path: &Path) -> Result<(usize, Vec<PackedSequence>)> {
    let mut bytes = Vec::new();
    BufReader::new(File::open(path).map_err(|e| Error::io(path, e))?)
        .read_to_end(&mut bytes)
        .map_err(|e| Error::io(path, e))?;
    let bad = || Error::model(path, "truncated or malformed packed file");
    let mut pos = 0usize;
    let mut take = |n: usize| -> Result<&[u8]> {
        let s = bytes.get(pos..pos + n).ok_or_else(bad)?;
        pos += n;
        Ok(s)
    };
    if take(8)? != MAGIC {
        return Err(Error::model(path, "not a packed corpus"));
    }
    let u32_of = |s: &[u8]| u32::from_le_bytes([s[0], s[1], s[2], s[3]]);
    let seq_len = u32_of(take(4)?) as usize;
    let n = u64::from_le_bytes(take(8)?.try_into().map_err(|_| bad())?);
    let mut seqs = Vec::new();
    for _ in 0..n {
        let tokens = take(seq_len * 4)?.chunks_exact(4).map(u32_of).collect();
        let padded = u32_of(take(4)?);
        let n_spans = u32_of(take(4)?);
        let mut spans = Vec::new();
        for _ in 0..n_spans {
            let l = u32_of(take(4)?) as usize;
            let doc_id = String::from_utf8(take(l)?.to_vec()).map_err(|_| bad())?;
            let doc_offset = u32_of(take(4)?);
            let length = u32_of(take(4)?);
            let position = u32_of(take(4)?);
            spans.push(Span { doc_id, doc_offset, length, position });
        }
        seqs.push(PackedSequence { tokens, spans, padded });
    }
    Ok((seq_len, seqs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn doc(id: &str, n: usize) -> (String, Vec<u32>) {
        (id.to_string(), (0..n as u32).map(|i| 1000 + i).collect())
    }

    #[test]
    fn two_short_docs() {
        let seqs = pack_sequences(&[doc("a", 10), doc("b", 10)], 32, None).unwrap();
        assert_eq!(seqs.len(), 1);
        let s = &seqs[0];
        assert_eq!(s.tokens[10], EOS_ID);
        assert_eq!(s.tokens[21], EOS_ID);
        assert!(s.tokens[22..].iter().all(|&t| t == PAD_ID));
        assert_eq!(s.padded, 10);
        assert_eq!(s.separator_positions(), vec![10, 21]);
    }

    #[test]
    fn long_doc_split() {
        let seqs = pack_sequences(&[doc("a", 100)], 32, None).unwrap();
        let lens: Vec<u32> = seqs.iter().flat_map(|s| s.spans.iter().map(|sp| sp.length)).collect();
        assert_eq!(lens, vec![31, 31, 31, 7]);
        assert_eq!(seqs[3].padded, 24);
        assert_eq!(seqs[1].spans[0].doc_offset, 31);
    }

    #[test]
    fn file_round_trip() {
        let seqs = pack_sequences(&[doc("a", 50), doc("b", 3)], 16, Some(4)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("p.bin");
        write_packed(&p, 16, &seqs).unwrap();
        assert_eq!(read_packed(&p).unwrap(), (16, seqs));
    }

    proptest! {
        #[test]
        fn conserves_tokens(lens in prop::collection::vec(0usize..200, 0..30), seq_len in 2usize..64) {
            let docs: Vec<_> = lens.iter().enumerate().map(|(i, &n)| doc(&format!("d{i}"), n)).collect();
            let seqs = pack_sequences(&docs, seq_len, None).unwrap();
            let total: usize = seqs.iter().flat_map(|s| &s.spans).map(|s| s.length as usize).sum();
            prop_assert_eq!(total, lens.iter().sum::<usize>());
            for s in &seqs {
                prop_assert_eq!(s.tokens.len(), seq_len);
                let mut cursor = 0;
                for sp in &s.spans {
                    prop_assert_eq!(sp.position, cursor);
                    let d = &docs.iter().find(|d| d.0 == sp.doc_id).unwrap().1;
                    let chunk = &d[sp.doc_offset as usize..(sp.doc_offset + sp.length) as usize];
                    prop_assert_eq!(&s.tokens[sp.position as usize..(sp.position + sp.length) as usize], chunk);
                    prop_assert_eq!(s.tokens[(sp.position + sp.length) as usize], EOS_ID);
                    cursor = sp.position + sp.length + 1;
                }
                prop_assert_eq!(cursor as usize + s.padded as usize, seq_len);
            }
        }
    }
}
