//! URL-substring, domain and word blocklists.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use super::segment::{for_each_word, is_cjk};
use super::FilterVerdict;
use crate::corpus::{dedup_normalize, Document};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Default)]
pub struct Blocklists {
    pub url_substrings: Vec<String>,
    pub domains: HashSet<String>,
    /// Whole-word entries.
    pub words: HashSet<String>,
    /// Entries containing CJK characters match as substrings, since the
    /// text has no word boundaries to anchor on.
    pub cjk_phrases: Vec<String>,
}

/// One entry per line, `#` starts a comment, blank lines ignored.
pub fn parse_list(content: &str) -> Vec<String> {
    content
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(dedup_normalize)
        .collect()
}

fn read_list(path: Option<&Path>) -> Result<Vec<String>> {
    match path {
        None => Ok(Vec::new()),
        Some(p) => Ok(parse_list(&fs::read_to_string(p).map_err(|e| Error::io(p, e))?)),
    }
}

/// Host part of a URL, lowercased, without port or credentials.
pub fn url_host(url: &str) -> Option<String> {
    let rest = url.split_once("://").map_or(url, |(_, r)| r);
    let authority = rest.split(['/', '?', '#']).next()?;
    let host = authority.rsplit('@').next()?;
    let host = host.split(':').next()?.trim_end_matches('.');
    (!host.is_empty()).then(|| host.to_ascii_lowercase())
}

impl Blocklists {
    pub fn new<S: AsRef<str>>(url_substrings: &[S], domains: &[S], words: &[S]) -> Self {
        let mut lists = Blocklists {
            url_substrings: url_substrings.iter().map(|s| dedup_normalize(s.as_ref())).collect(),
            domains: domains.iter().map(|s| dedup_normalize(s.as_ref())).collect(),
            ..Default::default()
        };
        for w in words {
            lists.add_word(dedup_normalize(w.as_ref()));
        }
        lists
    }

    fn add_word(&mut self, w: String) {
        if w.chars().any(is_cjk) {
            self.cjk_phrases.push(w);
        } else {
            self.words.insert(w);
        }
    }

    pub fn load(urls: Option<&Path>, domains: Option<&Path>, words: Option<&Path>) -> Result<Self> {
        let mut lists = Blocklists {
            url_substrings: read_list(urls)?,
            domains: read_list(domains)?.into_iter().collect(),
            ..Default::default()
        };
        for w in read_list(words)? {
            lists.add_word(w);
        }
        Ok(lists)
    }

    pub fn is_empty(&self) -> bool {
        self.url_substrings.is_empty()
            && self.domains.is_empty()
            && self.words.is_empty()
            && self.cjk_phrases.is_empty()
    }

    fn domain_blocked(&self, host: &str) -> bool {
        if self.domains.contains(host) {
            return true;
        }
        host.match_indices('.').any(|(i, _)| self.domains.contains(&host[i + 1..]))
    }
}

pub fn apply_blocklists(doc: &Document, lists: &Blocklists) -> FilterVerdict {
    if lists.is_empty() {
        return FilterVerdict::keep();
    }
    if let Some(url) = &doc.url {
        let url_norm = dedup_normalize(url);
        if lists.url_substrings.iter().any(|s| url_norm.contains(s.as_str())) {
            return FilterVerdict::drop("url");
        }
        if url_host(url).is_some_and(|h| lists.domain_blocked(&h)) {
            return FilterVerdict::drop("domain");
        }
    }
    if lists.words.is_empty() && lists.cjk_phrases.is_empty() {
        return FilterVerdict::keep();
    }
    let text = dedup_normalize(&doc.text);
    if lists.cjk_phrases.iter().any(|p| text.contains(p.as_str())) {
        return FilterVerdict::drop("word");
    }
    let mut hit = false;
    for_each_word(&text, |w| {
        if !hit {
            let core = w.trim_matches(|c: char| !c.is_alphanumeric());
            hit = !core.is_empty() && lists.words.contains(core);
        }
    });
    if hit {
        FilterVerdict::drop("word")
    } else {
        FilterVerdict::keep()
    }
}
