//! Persistent registry of retained documents' signatures, so near-duplicate
//! removal can continue across corpus batches. Band tables are rebuilt on
//! load from the stored signatures.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::minhash::{Signature, NUM_PERM};
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"CURSNAP\0";
const VERSION: u32 = 1;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DedupSnapshot {
    /// (doc id, signature), sorted by id.
    pub entries: Vec<(String, Box<Signature>)>,
}

impl DedupSnapshot {
    pub fn extend(&mut self, more: impl IntoIterator<Item = (String, Box<Signature>)>) -> Result<()> {
        self.entries.extend(more);
        self.entries.sort_by(|a, b| a.0.cmp(&b.0));
        if let Some(w) = self.entries.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::DuplicateDocId(w[0].0.clone()));
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let io = |e| Error::io(path, e);
        let tmp = path.with_extension("partial");
        let mut w = BufWriter::new(File::create(&tmp).map_err(io)?);
        w.write_all(MAGIC).map_err(io)?;
        w.write_all(&VERSION.to_le_bytes()).map_err(io)?;
        w.write_all(&(NUM_PERM as u32).to_le_bytes()).map_err(io)?;
        w.write_all(&(self.entries.len() as u64).to_le_bytes()).map_err(io)?;
        for (id, sig) in &self.entries {
            w.write_all(&(id.len() as u32).to_le_bytes()).map_err(io)?;
            w.write_all(id.as_bytes()).map_err(io)?;
            for v in sig.iter() {
                w.write_all(&v.to_le_bytes()).map_err(io)?;
            }
        }
        w.flush().map_err(io)?;
        drop(w);
        std::fs::rename(&tmp, path).map_err(io)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let io = |e| Error::io(path, e);
        let mut r = BufReader::new(File::open(path).map_err(io)?);
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic).map_err(io)?;
        if &magic != MAGIC {
            return Err(Error::model(path, "not a dedup snapshot"));
        }
        let mut b4 = [0u8; 4];
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b4).map_err(io)?;
        let found = u32::from_le_bytes(b4);
        if found != VERSION {
            return Err(Error::ModelVersion { path: path.to_path_buf(), found, expected: VERSION });
        }
        r.read_exact(&mut b4).map_err(io)?;
        if u32::from_le_bytes(b4) as usize != NUM_PERM {
            return Err(Error::model(path, "signature length mismatch"));
        }
        r.read_exact(&mut b8).map_err(io)?;
        let n = u64::from_le_bytes(b8);
        let mut entries = Vec::new();
        for _ in 0..n {
            r.read_exact(&mut b4).map_err(io)?;
            let mut id = vec![0u8; u32::from_le_bytes(b4) as usize];
            r.read_exact(&mut id).map_err(io)?;
            let id = String::from_utf8(id).map_err(|_| Error::model(path, "id is not UTF-8"))?;
            let mut sig = Box::new([0u64; NUM_PERM]);
            for v in sig.iter_mut() {
                r.read_exact(&mut b8).map_err(io)?;
                *v = u64::from_le_bytes(b8);
            }
            entries.push((id, sig));
        }
        let mut snap = DedupSnapshot::default();
        snap.extend(entries)?;
        Ok(snap)
    }
}
