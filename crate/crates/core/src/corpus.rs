//! Canonical document record, raw-format ingestion (WET), sharded JSONL
//! corpora with manifests, and per-stage accounting.

use std::borrow::Borrow;
use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use unicode_normalization::{is_nfc_quick, IsNormalized, UnicodeNormalization};

use crate::error::{Error, Result};
use crate::hashing::{hash64, SeqDigest};

/// Free-form per-document metadata. Keys written by a stage are prefixed
/// with the stage name (`"quality.score"`).
pub type Meta = BTreeMap<String, Value>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    #[serde(default)]
    pub source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub url: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lang: Option<String>,
    #[serde(default)]
    pub text: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub meta: Meta,
}

impl Document {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Self {
        Document { id: id.into(), source: String::new(), url: None, lang: None, text: text.into(), meta: Meta::new() }
    }

    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        self.source = source.into();
        self
    }

    pub fn with_url(mut self, url: impl Into<String>) -> Self {
        self.url = Some(url.into());
        self
    }

    pub fn with_lang(mut self, lang: impl Into<String>) -> Self {
        self.lang = Some(lang.into());
        self
    }

    pub fn set_meta(&mut self, stage: &str, key: &str, value: impl Into<Value>) {
        self.meta.insert(format!("{stage}.{key}"), value.into());
    }

    pub fn meta_f64(&self, key: &str) -> Option<f64> {
        self.meta.get(key).and_then(Value::as_f64)
    }

    pub fn meta_str(&self, key: &str) -> Option<&str> {
        self.meta.get(key).and_then(Value::as_str)
    }
}

/// Canonical key text for the dedup stages: NFC, lowercase, every
/// whitespace run collapsed to one space, ends trimmed.
pub fn dedup_normalize(text: &str) -> String {
    if text.is_ascii() {
        return normalize_ascii(text.as_bytes());
    }
    if is_nfc_quick(text.chars()) == IsNormalized::Yes {
        let out = collapse(text.chars().flat_map(char::to_lowercase), text.len());
        if is_nfc_quick(out.chars()) == IsNormalized::Yes {
            return out;
        }
    }
    // Lowercasing can produce sequences that need recomposition.
    let lowered: String = text.nfc().flat_map(char::to_lowercase).collect();
    collapse(lowered.nfc(), lowered.len())
}

fn normalize_ascii(b: &[u8]) -> String {
    let mut out: Vec<u8> = Vec::with_capacity(b.len());
    let mut pending_space = false;
    for &c in b {
        if matches!(c, b' ' | b'\t'..=b'\r') {
            pending_space = !out.is_empty();
        } else {
            if pending_space {
                out.push(b' ');
                pending_space = false;
            }
            out.push(c.to_ascii_lowercase());
        }
    }
    String::from_utf8(out).expect("ascii input")
}

fn collapse(chars: impl Iterator<Item = char>, capacity: usize) -> String {
    let mut out = String::with_capacity(capacity);
    let mut pending_space = false;
    for c in chars {
        if c.is_whitespace() {
            pending_space = !out.is_empty();
        } else {
            if pending_space {
                out.push(' ');
                pending_space = false;
            }
            out.push(c);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// WET ingestion

const WET_SOURCE: &str = "common-crawl";

fn find_subslice(hay: &[u8], needle: &[u8]) -> Option<usize> {
    hay.windows(needle.len()).position(|w| w == needle)
}

fn header_boundary(raw: &[u8]) -> Option<(usize, usize)> {
    let crlf = find_subslice(raw, b"\r\n\r\n").map(|i| (i, i + 4));
    let lf = find_subslice(raw, b"\n\n").map(|i| (i, i + 2));
    match (crlf, lf) {
        (Some(a), Some(b)) => Some(if a.0 <= b.0 { a } else { b }),
        (a, b) => a.or(b),
    }
}

fn parse_headers(block: &[u8]) -> Result<Vec<(String, String)>> {
    let block = std::str::from_utf8(block).map_err(|_| Error::MalformedRecord("header block is not UTF-8".into()))?;
    let mut lines = block.lines();
    match lines.next() {
        Some(first) if first.trim_end().starts_with("WARC/") => {}
        _ => return Err(Error::MalformedRecord("missing WARC version line".into())),
    }
    Ok(lines
        .filter_map(|l| {
            let (k, v) = l.split_once(':')?;
            Some((k.trim().to_ascii_lowercase(), v.trim().to_string()))
        })
        .collect())
}

fn header<'a>(headers: &'a [(String, String)], name: &str) -> Option<&'a str> {
    headers.iter().find(|(k, _)| k == name).map(|(_, v)| v.as_str())
}

fn iso639_3_to_1(code: &str) -> Option<&'static str> {
    Some(match code {
        "eng" => "en",
        "zho" => "zh",
        "deu" => "de",
        "fra" => "fr",
        "spa" => "es",
        "rus" => "ru",
        "jpn" => "ja",
        "por" => "pt",
        "ita" => "it",
        "kor" => "ko",
        _ => return None,
    })
}

/// Parses one WET record: a WARC version line, header lines, a blank line,
/// then the extracted-text payload.
pub fn parse_wet_record(raw: &[u8]) -> Result<Document> {
    let (header_end, payload_start) =
        header_boundary(raw).ok_or_else(|| Error::MalformedRecord("no header/payload boundary".into()))?;
    let headers = parse_headers(&raw[..header_end])?;
    let rest = &raw[payload_start..];
    let payload = match header(&headers, "content-length").and_then(|v| v.parse::<usize>().ok()) {
        Some(n) if n <= rest.len() => &rest[..n],
        Some(n) => {
            return Err(Error::MalformedRecord(format!("content-length {n} exceeds {} available bytes", rest.len())))
        }
        None => {
            let mut end = rest.len();
            while end > 0 && matches!(rest[end - 1], b'\r' | b'\n') {
                end -= 1;
            }
            &rest[..end]
        }
    };
    let text = std::str::from_utf8(payload).map_err(|_| Error::InvalidUtf8)?;
    let url = header(&headers, "warc-target-uri").map(str::to_string);
    let id = match header(&headers, "warc-record-id") {
        Some(rid) => rid.trim_start_matches('<').trim_end_matches('>').to_string(),
        None => {
            let mut key = url.clone().unwrap_or_default().into_bytes();
            key.extend_from_slice(payload);
            format!("wet:{:016x}", hash64(&key, 0))
        }
    };
    let mut doc = Document::new(id, text).with_source(WET_SOURCE);
    doc.url = url;
    if let Some(langs) = header(&headers, "warc-identified-content-language") {
        doc.lang = langs.split(',').next().and_then(|c| iso639_3_to_1(c.trim())).map(str::to_string);
    }
    if let Some(date) = header(&headers, "warc-date") {
        doc.set_meta("wet", "date", date);
    }
    Ok(doc)
}

/// Streams `conversion` records out of a WET file. Malformed or non-UTF-8
/// records are skipped and tallied in [`WetReader::skipped`]; only I/O
/// failures surface as errors.
pub struct WetReader<R> {
    inner: R,
    path: PathBuf,
    line: Vec<u8>,
    pub records_seen: u64,
    pub skipped: BTreeMap<String, u64>,
}

impl WetReader<Box<dyn BufRead>> {
    /// Opens a plain or gzip-compressed (`.gz`) WET file.
    pub fn open(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let inner: Box<dyn BufRead> = if path.extension().is_some_and(|e| e == "gz") {
            Box::new(BufReader::new(flate2::read::MultiGzDecoder::new(file)))
        } else {
            Box::new(BufReader::new(file))
        };
        Ok(WetReader::new(inner, path))
    }
}

impl<R: BufRead> WetReader<R> {
    pub fn new(inner: R, path: &Path) -> Self {
        WetReader { inner, path: path.to_path_buf(), line: Vec::new(), records_seen: 0, skipped: BTreeMap::new() }
    }

    fn skip(&mut self, reason: &str) {
        *self.skipped.entry(reason.to_string()).or_default() += 1;
    }

    fn read_line(&mut self) -> Result<bool> {
        self.line.clear();
        let n = self.inner.read_until(b'\n', &mut self.line).map_err(|e| Error::io(&self.path, e))?;
        Ok(n > 0)
    }

    /// Returns the next raw record (headers + payload) or `None` at EOF.
    fn next_raw(&mut self) -> Result<Option<(Vec<u8>, bool)>> {
        // Seek to a version line.
        loop {
            if !self.read_line()? {
                return Ok(None);
            }
            if self.line.starts_with(b"WARC/") {
                break;
            }
        }
        let mut raw = self.line.clone();
        let mut content_length = None;
        let mut is_conversion = false;
        loop {
            if !self.read_line()? {
                return Err(Error::MalformedRecord("truncated header".into()));
            }
            raw.extend_from_slice(&self.line);
            let trimmed = trim_eol(&self.line);
            if trimmed.is_empty() {
                break;
            }
            if let Ok(s) = std::str::from_utf8(trimmed) {
                if let Some((k, v)) = s.split_once(':') {
                    let k = k.trim();
                    if k.eq_ignore_ascii_case("content-length") {
                        content_length = v.trim().parse::<usize>().ok();
                    } else if k.eq_ignore_ascii_case("warc-type") {
                        is_conversion = v.trim() == "conversion";
                    }
                }
            }
        }
        let n = content_length.ok_or_else(|| Error::MalformedRecord("missing content-length".into()))?;
        let start = raw.len();
        raw.resize(start + n, 0);
        self.inner.read_exact(&mut raw[start..]).map_err(|e| Error::io(&self.path, e))?;
        Ok(Some((raw, is_conversion)))
    }
}

fn trim_eol(line: &[u8]) -> &[u8] {
    let mut end = line.len();
    while end > 0 && matches!(line[end - 1], b'\r' | b'\n') {
        end -= 1;
    }
    &line[..end]
}

impl<R: BufRead> Iterator for WetReader<R> {
    type Item = Result<Document>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let (raw, is_conversion) = match self.next_raw() {
                Ok(Some(r)) => r,
                Ok(None) => return None,
                Err(Error::MalformedRecord(_)) => {
                    self.skip("malformed");
                    continue;
                }
                Err(e) => return Some(Err(e)),
            };
            self.records_seen += 1;
            if !is_conversion {
                self.skip("non-conversion");
                continue;
            }
            match parse_wet_record(&raw) {
                Ok(doc) => return Some(Ok(doc)),
                Err(Error::InvalidUtf8) => self.skip("invalid-utf8"),
                Err(Error::MalformedRecord(_)) => self.skip("malformed"),
                Err(e) => return Some(Err(e)),
            }
        }
    }
}

/// `*.wet`, `*.wet.gz` and `*.warc.wet.gz` files.
pub fn is_wet_path(path: &Path) -> bool {
    let name = path.file_name().map(|n| n.to_string_lossy().to_lowercase()).unwrap_or_default();
    name.ends_with(".wet") || name.ends_with(".wet.gz")
}

/// Reads a WET file or a JSONL shard; returns the documents and the number
/// of skipped records or lines.
pub fn read_documents(path: &Path) -> Result<(Vec<Document>, u64)> {
    if is_wet_path(path) {
        let mut reader = WetReader::open(path)?;
        let docs = reader.by_ref().collect::<Result<Vec<_>>>()?;
        Ok((docs, reader.skipped.values().sum()))
    } else {
        read_jsonl_shard(path)
    }
}

// ---------------------------------------------------------------------------
// JSONL shards

#[derive(Deserialize)]
struct RawDocument {
    id: Option<String>,
    #[serde(default)]
    source: String,
    #[serde(default)]
    url: Option<String>,
    #[serde(default)]
    lang: Option<String>,
    #[serde(default)]
    text: String,
    #[serde(default)]
    meta: Meta,
}

/// Line-by-line reader. Syntax errors are counted in `skipped` and the line
/// is dropped; a syntactically valid record without an id is a hard error.
pub struct JsonlReader<R> {
    inner: R,
    path: PathBuf,
    line_no: usize,
    buf: String,
    pub skipped: u64,
}

impl JsonlReader<BufReader<File>> {
    pub fn open(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Ok(JsonlReader::new(BufReader::new(file), path))
    }
}

impl<R: BufRead> JsonlReader<R> {
    pub fn new(inner: R, path: &Path) -> Self {
        JsonlReader { inner, path: path.to_path_buf(), line_no: 0, buf: String::new(), skipped: 0 }
    }
}

impl<R: BufRead> Iterator for JsonlReader<R> {
    type Item = Result<Document>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            self.buf.clear();
            match self.inner.read_line(&mut self.buf) {
                Ok(0) => return None,
                Ok(_) => {}
                Err(e) => return Some(Err(Error::io(&self.path, e))),
            }
            self.line_no += 1;
            let line = self.buf.trim_end_matches(['\n', '\r']);
            if line.trim().is_empty() {
                continue;
            }
            let raw: RawDocument = match serde_json::from_str(line) {
                Ok(r) => r,
                Err(e) => {
                    log::debug!("{}:{}: skipping line: {e}", self.path.display(), self.line_no);
                    self.skipped += 1;
                    continue;
                }
            };
            let Some(id) = raw.id.filter(|id| !id.is_empty()) else {
                return Some(Err(Error::MissingId { path: self.path.clone(), line: self.line_no }));
            };
            return Some(Ok(Document {
                id,
                source: raw.source,
                url: raw.url,
                lang: raw.lang,
                text: raw.text,
                meta: raw.meta,
            }));
        }
    }
}

/// Reads a whole shard, returning the documents and the number of skipped
/// lines.
pub fn read_jsonl_shard(path: &Path) -> Result<(Vec<Document>, u64)> {
    let mut reader = JsonlReader::open(path)?;
    let docs = reader.by_ref().collect::<Result<Vec<_>>>()?;
    Ok((docs, reader.skipped))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShardManifest {
    pub shard_path: String,
    pub doc_count: u64,
    pub byte_count: u64,
    /// Order-sensitive digest of the document ids.
    pub content_digest: u64,
}

impl ShardManifest {
    pub fn sidecar_path(shard: &Path) -> PathBuf {
        let mut s = shard.as_os_str().to_owned();
        s.push(".manifest.json");
        PathBuf::from(s)
    }

    pub fn load(shard: &Path) -> Result<Self> {
        let p = Self::sidecar_path(shard);
        let bytes = fs::read(&p).map_err(|e| Error::io(&p, e))?;
        serde_json::from_slice(&bytes).map_err(|e| Error::model(&p, e.to_string()))
    }
}

fn partial_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".partial");
    PathBuf::from(s)
}

/// Writes one document per line. Output goes to `<path>.partial` and is
/// renamed into place only once complete; a failure leaves the `.partial`
/// file behind. The manifest sidecar is written next to the shard.
pub fn write_jsonl_shard<I, D>(docs: I, path: &Path) -> Result<ShardManifest>
where
    I: IntoIterator<Item = D>,
    D: Borrow<Document>,
{
    let partial = partial_path(path);
    let file = File::create(&partial).map_err(|e| Error::io(&partial, e))?;
    let mut w = BufWriter::new(file);
    let mut digest = SeqDigest::default();
    let mut doc_count = 0u64;
    let mut byte_count = 0u64;
    let mut line = Vec::new();
    for doc in docs {
        let doc = doc.borrow();
        line.clear();
        serde_json::to_writer(&mut line, doc).map_err(|e| Error::Invalid(e.to_string()))?;
        line.push(b'\n');
        w.write_all(&line).map_err(|e| Error::io(&partial, e))?;
        digest.push(&doc.id);
        doc_count += 1;
        byte_count += line.len() as u64;
    }
    w.flush().map_err(|e| Error::io(&partial, e))?;
    drop(w);
    fs::rename(&partial, path).map_err(|e| Error::io(path, e))?;
    let manifest = ShardManifest {
        shard_path: path.file_name().map_or_else(|| path.to_string_lossy(), |n| n.to_string_lossy()).into_owned(),
        doc_count,
        byte_count,
        content_digest: digest.finish(),
    };
    let sidecar = ShardManifest::sidecar_path(path);
    let json = serde_json::to_vec_pretty(&manifest).map_err(|e| Error::Invalid(e.to_string()))?;
    fs::write(&sidecar, json).map_err(|e| Error::io(&sidecar, e))?;
    Ok(manifest)
}

// ---------------------------------------------------------------------------
// Stage accounting

/// Removal accounting for one pipeline stage.
///
/// `docs_in = docs_kept + docs_dropped`; `docs_born` counts extra documents
/// created by splitting (coherence segmentation), so the next stage sees
/// `docs_out = docs_kept + docs_born` documents.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StageReport {
    pub stage_name: String,
    pub docs_in: u64,
    pub docs_kept: u64,
    pub docs_dropped: u64,
    pub docs_born: u64,
    pub docs_out: u64,
    pub tokens_in: u64,
    pub tokens_kept: u64,
    pub drop_reasons: BTreeMap<String, u64>,
}

impl StageReport {
    pub fn new(stage_name: impl Into<String>) -> Self {
        StageReport { stage_name: stage_name.into(), ..Default::default() }
    }

    pub fn drop_doc(&mut self, rule: &str) {
        self.docs_dropped += 1;
        *self.drop_reasons.entry(rule.to_string()).or_default() += 1;
    }

    pub fn merge(&mut self, other: &StageReport) {
        self.docs_in += other.docs_in;
        self.docs_kept += other.docs_kept;
        self.docs_dropped += other.docs_dropped;
        self.docs_born += other.docs_born;
        self.docs_out += other.docs_out;
        self.tokens_in += other.tokens_in;
        self.tokens_kept += other.tokens_kept;
        for (k, v) in &other.drop_reasons {
            *self.drop_reasons.entry(k.clone()).or_default() += v;
        }
    }

    pub fn removal_ratio(&self) -> f64 {
        let denom = self.docs_in + self.docs_born;
        if denom == 0 {
            0.0
        } else {
            self.docs_dropped as f64 / denom as f64
        }
    }

    /// Checks the internal invariants of this report.
    pub fn check(&self) -> std::result::Result<(), String> {
        let name = &self.stage_name;
        if self.docs_in != self.docs_kept + self.docs_dropped {
            return Err(format!(
                "{name}: docs_in {} != kept {} + dropped {}",
                self.docs_in, self.docs_kept, self.docs_dropped
            ));
        }
        let reasons: u64 = self.drop_reasons.values().sum();
        if reasons != self.docs_dropped {
            return Err(format!("{name}: drop reasons sum to {reasons}, dropped {}", self.docs_dropped));
        }
        if self.docs_out != self.docs_kept + self.docs_born {
            return Err(format!(
                "{name}: docs_out {} != kept {} + born {}",
                self.docs_out, self.docs_kept, self.docs_born
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn wet(uri: &str, payload: &str) -> Vec<u8> {
        format!(
            "WARC/1.0\r\nWARC-Type: conversion\r\nWARC-Target-URI: {uri}\r\n\
             WARC-Record-ID: <urn:uuid:1>\r\nContent-Length: {}\r\n\r\n{payload}\r\n\r\n",
            payload.len()
        )
        .into_bytes()
    }

    #[test]
    fn wet_record_maps_fields() {
        let doc = parse_wet_record(&wet("http://x.org", "hello")).unwrap();
        assert_eq!(doc.url.as_deref(), Some("http://x.org"));
        assert_eq!(doc.text, "hello");
        assert_eq!(doc.source, "common-crawl");
        assert_eq!(doc.id, "urn:uuid:1");
    }

    #[test]
    fn wet_empty_payload() {
        let doc = parse_wet_record(&wet("http://x.org", "")).unwrap();
        assert_eq!(doc.text, "");
    }

    #[test]
    fn wet_errors() {
        assert!(matches!(parse_wet_record(b"WARC/1.0\r\nWARC-Type: conversion"), Err(Error::MalformedRecord(_))));
        let mut raw = b"WARC/1.0\nContent-Length: 2\n\n".to_vec();
        raw.extend_from_slice(&[0xff, 0xfe]);
        assert!(matches!(parse_wet_record(&raw), Err(Error::InvalidUtf8)));
    }

    #[test]
    fn wet_reader_skips_bad_records() {
        let mut file = b"WARC/1.0\r\nWARC-Type: warcinfo\r\nContent-Length: 3\r\n\r\nabc\r\n\r\n".to_vec();
        file.extend(wet("http://a", "one"));
        file.extend_from_slice(b"WARC/1.0\r\nWARC-Type: conversion\r\nContent-Length: 2\r\n\r\n");
        file.extend_from_slice(&[0xc3, 0x28]);
        file.extend_from_slice(b"\r\n\r\n");
        file.extend(wet("http://b", "two"));
        let reader = WetReader::new(&file[..], Path::new("mem"));
        let mut reader = reader;
        let docs: Vec<_> = reader.by_ref().collect::<Result<_>>().unwrap();
        assert_eq!(docs.len(), 2);
        assert_eq!(docs[1].text, "two");
        assert_eq!(reader.skipped["invalid-utf8"], 1);
        assert_eq!(reader.skipped["non-conversion"], 1);
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(dedup_normalize("  Foo\tBAR\n"), "foo bar");
        assert_eq!(dedup_normalize(""), "");
        assert_eq!(dedup_normalize("Ångström  ÉTÉ"), "ångström été");
        // decomposed input composes
        assert_eq!(dedup_normalize("E\u{301}"), "\u{e9}");
    }

    proptest! {
        #[test]
        fn normalize_is_idempotent(s in "\\PC*") {
            let once = dedup_normalize(&s);
            prop_assert_eq!(dedup_normalize(&once), once);
        }

        #[test]
        fn normalize_idempotent_any_chars(s in any::<String>()) {
            let once = dedup_normalize(&s);
            prop_assert_eq!(dedup_normalize(&once), once);
        }
    }

    #[test]
    fn jsonl_round_trip_and_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.jsonl");
        let mut a = Document::new("a", "0123456789").with_source("books");
        a.set_meta("q", "score", 0.5);
        let b = Document::new("b", "9876543210").with_url("http://b").with_lang("en");
        let m = write_jsonl_shard([&a, &b], &path).unwrap();
        assert_eq!(m.doc_count, 2);
        assert_eq!(m.byte_count, fs::metadata(&path).unwrap().len());
        assert_eq!(ShardManifest::load(&path).unwrap(), m);
        let (docs, skipped) = read_jsonl_shard(&path).unwrap();
        assert_eq!(skipped, 0);
        assert_eq!(docs, vec![a.clone(), b.clone()]);

        let path2 = dir.path().join("t.jsonl");
        let m2 = write_jsonl_shard([&a, &b], &path2).unwrap();
        assert_eq!(m.content_digest, m2.content_digest);
        let m3 = write_jsonl_shard([&b, &a], &path2).unwrap();
        assert_ne!(m.content_digest, m3.content_digest);
    }

    #[test]
    fn empty_shard() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("e.jsonl");
        let m = write_jsonl_shard(Vec::<Document>::new(), &path).unwrap();
        assert_eq!(m.doc_count, 0);
        assert_eq!(fs::read(&path).unwrap().len(), 0);
    }

    #[test]
    fn jsonl_error_isolation_and_missing_id() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.jsonl");
        fs::write(&path, "{\"id\":\"1\",\"text\":\"a\"}\n{not json\n{\"id\":\"2\"}\n").unwrap();
        let (docs, skipped) = read_jsonl_shard(&path).unwrap();
        assert_eq!(docs.len(), 2);
        assert_eq!(skipped, 1);
        assert_eq!(docs[1].text, "");
        assert_eq!(docs[1].source, "");

        fs::write(&path, "{\"id\":\"1\"}\n{\"text\":\"no id\"}\n").unwrap();
        assert!(matches!(read_jsonl_shard(&path), Err(Error::MissingId { line: 2, .. })));
    }

    #[test]
    fn write_failure_leaves_partial() {
        let dir = tempfile::tempdir().unwrap();
        // The target is a directory, so the final rename fails.
        let path = dir.path().join("occupied");
        fs::create_dir(&path).unwrap();
        fs::write(path.join("x"), "x").unwrap();
        let err = write_jsonl_shard([Document::new("a", "b")], &path);
        assert!(err.is_err());
        assert!(partial_path(&path).exists());
    }

    #[test]
    fn stage_report_check() {
        let mut r = StageReport::new("s");
        r.docs_in = 3;
        r.docs_kept = 2;
        r.drop_doc("x");
        r.docs_born = 1;
        r.docs_out = 3;
        assert!(r.check().is_ok());
        r.docs_out = 2;
        assert!(r.check().is_err());
    }
}
