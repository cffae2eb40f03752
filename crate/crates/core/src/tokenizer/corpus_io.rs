//! Token-id corpus files: framed records of (document id, u32 token ids).

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"CURTOK1\0";

pub struct TokenCorpusWriter {
    path: PathBuf,
    out: BufWriter<File>,
    docs: u64,
}

impl TokenCorpusWriter {
    pub fn create(path: &Path) -> Result<Self> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = BufWriter::new(file);
        out.write_all(MAGIC).map_err(|e| Error::io(path, e))?;
        Ok(TokenCorpusWriter { path: path.to_path_buf(), out, docs: 0 })
    }

    pub fn write(&mut self, id: &str, tokens: &[u32]) -> Result<()> {
        let io = |e| Error::io(&self.path, e);
        let mut buf = Vec::with_capacity(8 + id.len() + tokens.len() * 4);
        buf.extend_from_slice(&(id.len() as u32).to_le_bytes());
        buf.extend_from_slice(id.as_bytes());
        buf.extend_from_slice(&(tokens.len() as u32).to_le_bytes());
        for t in tokens {
            buf.extend_from_slice(&t.to_le_bytes());
        }
        self.out.write_all(&buf).map_err(io)?;
        self.docs += 1;
        Ok(())
    }

    pub fn finish(mut self) -> Result<u64> {
        self.out.flush().map_err(|e| Error::io(&self.path, e))?;
        Ok(self.docs)
    }
}

pub struct TokenCorpusReader {
    path: PathBuf,
    inner: BufReader<File>,
}

impl TokenCorpusReader {
    pub fn open(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut inner = BufReader::new(file);
        let mut magic = [0u8; 8];
        inner.read_exact(&mut magic).map_err(|e| Error::io(path, e))?;
        if &magic != MAGIC {
            return Err(Error::model(path, "not a token corpus"));
        }
        Ok(TokenCorpusReader { path: path.to_path_buf(), inner })
    }

    fn read_u32(&mut self) -> Result<Option<u32>> {
        let mut b = [0u8; 4];
        let mut got = 0;
        while got < 4 {
            let n = self.inner.read(&mut b[got..]).map_err(|e| Error::io(&self.path, e))?;
            if n == 0 {
                return if got == 0 { Ok(None) } else { Err(Error::model(&self.path, "truncated record")) };
            }
            got += n;
        }
        Ok(Some(u32::from_le_bytes(b)))
    }

    fn read_record(&mut self) -> Result<Option<(String, Vec<u32>)>> {
        let Some(id_len) = self.read_u32()? else {
            return Ok(None);
        };
        let path = self.path.clone();
        let truncated = |_| Error::model(&path, "truncated record");
        let mut id = vec![0u8; id_len as usize];
        self.inner.read_exact(&mut id).map_err(truncated)?;
        let id = String::from_utf8(id).map_err(|_| Error::model(&path, "document id is not UTF-8"))?;
        let n = self.read_u32()?.ok_or_else(|| Error::model(&path, "truncated record"))?;
        let mut raw = vec![0u8; n as usize * 4];
        self.inner.read_exact(&mut raw).map_err(truncated)?;
        let tokens = raw.chunks_exact(4).map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]])).collect();
        Ok(Some((id, tokens)))
    }
}

impl Iterator for TokenCorpusReader {
    type Item = Result<(String, Vec<u32>)>;

    fn next(&mut self) -> Option<Self::Item> {
        self.read_record().transpose()
    }
}

pub fn read_token_corpus(path: &Path) -> Result<Vec<(String, Vec<u32>)>> {
    TokenCorpusReader::open(path)?.collect()
}
