//! Mixture reporting: document and token shares by source, language and
//! topic, plus the per-stage removal table.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Document, StageReport};
use crate::error::{Error, Result};
use crate::heuristics::segment::word_count;
use crate::tokenizer::Tokenizer;

/// How tokens are counted in a mixture report.
#[derive(Debug, Clone, Copy)]
pub enum TokenCounter<'a> {
    Tokenizer(&'a Tokenizer),
    /// Words under the segmentation rule.
    Words,
}

impl TokenCounter<'_> {
    pub fn count(&self, text: &str) -> u64 {
        match self {
            TokenCounter::Tokenizer(t) => t.encode(text).len() as u64,
            TokenCounter::Words => word_count(text) as u64,
        }
    }

    pub fn unit(&self) -> &'static str {
        match self {
            TokenCounter::Tokenizer(_) => "tokens",
            TokenCounter::Words => "words",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Share {
    pub docs: u64,
    pub tokens: u64,
    pub doc_frac: f64,
    pub token_frac: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Counts {
    pub docs: u64,
    pub tokens: u64,
    pub by_source: BTreeMap<String, (u64, u64)>,
    pub by_lang: BTreeMap<String, (u64, u64)>,
    pub by_topic: BTreeMap<String, (u64, u64)>,
}

impl Counts {
    fn add(&mut self, doc: &Document, tokens: u64, topic_key: &str) {
        self.docs += 1;
        self.tokens += tokens;
        let source = if doc.source.is_empty() { "unknown" } else { &doc.source };
        let lang = doc.lang.as_deref().unwrap_or("unknown");
        let topic = doc.meta_str(topic_key).unwrap_or("unlabeled");
        for (map, key) in [(&mut self.by_source, source), (&mut self.by_lang, lang), (&mut self.by_topic, topic)] {
            let e = map.entry(key.to_string()).or_default();
            e.0 += 1;
            e.1 += tokens;
        }
    }

    pub fn merge(&mut self, other: &Counts) {
        self.docs += other.docs;
        self.tokens += other.tokens;
        for (mine, theirs) in [
            (&mut self.by_source, &other.by_source),
            (&mut self.by_lang, &other.by_lang),
            (&mut self.by_topic, &other.by_topic),
        ] {
            for (k, (d, t)) in theirs {
                let e = mine.entry(k.clone()).or_default();
                e.0 += d;
                e.1 += t;
            }
        }
    }
}

fn shares(map: &BTreeMap<String, (u64, u64)>, docs: u64, tokens: u64) -> BTreeMap<String, Share> {
    let frac = |a: u64, b: u64| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    map.iter()
        .map(|(k, &(d, t))| {
            (k.clone(), Share { docs: d, tokens: t, doc_frac: frac(d, docs), token_frac: frac(t, tokens) })
        })
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MixtureReport {
    pub token_unit: String,
    pub docs: u64,
    pub tokens: u64,
    pub by_source: BTreeMap<String, Share>,
    pub by_lang: BTreeMap<String, Share>,
    pub by_topic: BTreeMap<String, Share>,
    pub input_docs: u64,
    pub skipped_input_lines: u64,
    pub stages: Vec<StageReport>,
    /// Dropped documents over all documents that entered any stage.
    pub removal_ratio: f64,
}

impl MixtureReport {
    pub fn from_counts(counts: &Counts, unit: &str) -> Self {
        MixtureReport {
            token_unit: unit.to_string(),
            docs: counts.docs,
            tokens: counts.tokens,
            by_source: shares(&counts.by_source, counts.docs, counts.tokens),
            by_lang: shares(&counts.by_lang, counts.docs, counts.tokens),
            by_topic: shares(&counts.by_topic, counts.docs, counts.tokens),
            ..Default::default()
        }
    }

    pub fn set_stages(&mut self, input_docs: u64, stages: Vec<StageReport>) {
        self.input_docs = input_docs;
        let dropped: u64 = stages.iter().map(|s| s.docs_dropped).sum();
        let born: u64 = stages.iter().map(|s| s.docs_born).sum();
        let denom = input_docs + born;
        self.removal_ratio = if denom == 0 { 0.0 } else { dropped as f64 / denom as f64 };
        self.stages = stages;
    }

    /// Checks every stage report, the chaining between stages and overall
    /// conservation: input = dropped + output - born.
    pub fn check(&self) -> Result<()> {
        let mut expected_in = self.input_docs;
        for s in &self.stages {
            s.check().map_err(Error::Accounting)?;
            if s.docs_in != expected_in {
                return Err(Error::Accounting(format!(
                    "{}: docs_in {} but previous stage emitted {expected_in}",
                    s.stage_name, s.docs_in
                )));
            }
            expected_in = s.docs_out;
        }
        if expected_in != self.docs {
            return Err(Error::Accounting(format!(
                "last stage emitted {expected_in} documents, output holds {}",
                self.docs
            )));
        }
        let dropped: u64 = self.stages.iter().map(|s| s.docs_dropped).sum();
        let born: u64 = self.stages.iter().map(|s| s.docs_born).sum();
        if self.input_docs + born != dropped + self.docs {
            return Err(Error::Accounting(format!(
                "input {} + born {born} != dropped {dropped} + output {}",
                self.input_docs, self.docs
            )));
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "input documents      {}", self.input_docs);
        let _ = writeln!(s, "skipped input lines  {}", self.skipped_input_lines);
        let _ = writeln!(s, "output documents     {}", self.docs);
        let _ = writeln!(s, "output {:<14}{}", self.token_unit, self.tokens);
        let _ = writeln!(s, "removal ratio        {:.4}", self.removal_ratio);
        if !self.stages.is_empty() {
            let _ = writeln!(s, "\nstages");
            let _ = writeln!(
                s,
                "  {:<18} {:>9} {:>9} {:>9} {:>7} {:>9} {:>8}",
                "name", "in", "kept", "dropped", "born", "out", "removed"
            );
            for st in &self.stages {
                let _ = writeln!(
                    s,
                    "  {:<18} {:>9} {:>9} {:>9} {:>7} {:>9} {:>7.2}%",
                    st.stage_name,
                    st.docs_in,
                    st.docs_kept,
                    st.docs_dropped,
                    st.docs_born,
                    st.docs_out,
                    100.0 * st.removal_ratio()
                );
                for (rule, n) in &st.drop_reasons {
                    let _ = writeln!(s, "      {rule:<30} {n:>9}");
                }
            }
        }
        for (title, map) in [("source", &self.by_source), ("language", &self.by_lang), ("topic", &self.by_topic)] {
            if map.is_empty() {
                continue;
            }
            let _ = writeln!(s, "\nby {title}");
            for (k, v) in map {
                let _ = writeln!(
                    s,
                    "  {k:<18} {:>9} docs {:>7.2}%  {:>12} {} {:>7.2}%",
                    v.docs,
                    100.0 * v.doc_frac,
                    v.tokens,
                    self.token_unit,
                    100.0 * v.token_frac
                );
            }
        }
        s
    }
}

pub fn count_docs(docs: &[Document], counter: TokenCounter, topic_key: &str) -> Counts {
    let tokens: Vec<u64> = docs.par_iter().map(|d| counter.count(&d.text)).collect();
    let mut c = Counts::default();
    for (d, t) in docs.iter().zip(tokens) {
        c.add(d, t, topic_key);
    }
    c
}

/// Mixture of a corpus under a tokenizer model; `None` is an error.
pub fn report_mixture(docs: &[Document], tokenizer: Option<&Tokenizer>, topic_key: &str) -> Result<MixtureReport> {
    let tok = tokenizer.ok_or(Error::MissingTokenizer)?;
    let counter = TokenCounter::Tokenizer(tok);
    let counts = count_docs(docs, counter, topic_key);
    Ok(MixtureReport::from_counts(&counts, counter.unit()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_source_is_everything() {
        let docs = vec![Document::new("a", "one two three four five six seven eight nine ten").with_source("books")];
        let c = count_docs(&docs, TokenCounter::Words, "topic.label");
        let r = MixtureReport::from_counts(&c, "words");
        assert_eq!(r.tokens, 10);
        assert_eq!(r.by_source["books"].token_frac, 1.0);
        assert_eq!(r.by_topic["unlabeled"].docs, 1);
    }

    #[test]
    fn equal_sources_split_evenly() {
        let docs =
            vec![Document::new("a", "x y z").with_source("web"), Document::new("b", "p q r").with_source("code")];
        let r = MixtureReport::from_counts(&count_docs(&docs, TokenCounter::Words, "t"), "words");
        assert_eq!(r.by_source["web"].token_frac, 0.5);
        assert_eq!(r.by_source["code"].token_frac, 0.5);
    }

    #[test]
    fn missing_tokenizer_is_an_error() {
        assert!(matches!(report_mixture(&[], None, "t"), Err(Error::MissingTokenizer)));
    }

    #[test]
    fn conservation_check() {
        let mut st = StageReport::new("f");
        st.docs_in = 10;
        st.docs_kept = 7;
        st.drop_doc("r");
        st.drop_doc("r");
        st.drop_doc("q");
        st.docs_born = 2;
        st.docs_out = 9;
        let mut r = MixtureReport { docs: 9, ..Default::default() };
        r.set_stages(10, vec![st.clone()]);
        r.check().unwrap();
        assert!((r.removal_ratio - 3.0 / 12.0).abs() < 1e-12);
        r.docs = 8;
        assert!(r.check().is_err());
    }
}
