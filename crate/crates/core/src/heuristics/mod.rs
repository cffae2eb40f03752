//! Rule-based filtering: blocklists, structural checks, repetition
//! statistics and PII masking.

mod blocklist;
mod pii;
mod repetition;
pub mod segment;
mod structural;

use serde::{Deserialize, Serialize};

pub use blocklist::{apply_blocklists, parse_list, url_host, Blocklists};
pub use pii::{anonymize_pii, EMAIL_MASK, PHONE_MASK};
pub use repetition::{
    repetition_stats, repetition_stats_text, repetition_verdict, RepetitionStats, RepetitionThresholds,
    DUP_NGRAM_SIZES, TOP_NGRAM_SIZES,
};
pub use segment::{segment, Segments};
pub use structural::{structural_verdict, symbol_count};

use crate::corpus::Document;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterVerdict {
    pub keep: bool,
    /// Empty when `keep`.
    pub rule_id: String,
}

impl FilterVerdict {
    pub fn keep() -> Self {
        FilterVerdict { keep: true, rule_id: String::new() }
    }

    pub fn drop(rule: impl Into<String>) -> Self {
        let rule_id = rule.into();
        debug_assert!(!rule_id.is_empty());
        FilterVerdict { keep: false, rule_id }
    }
}

/// Thresholds for the structural and repetition rules. Defaults follow the
/// Gopher rule family; ties at a threshold keep the document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HeuristicConfig {
    pub min_words: usize,
    pub max_words: usize,
    pub max_symbol_word_ratio: f64,
    pub max_ellipsis_line_frac: f64,
    pub max_short_line_frac: f64,
    pub max_incomplete_line_frac: f64,
    pub min_alpha_word_frac: f64,
    pub short_line_max_words: usize,
    pub repetition: RepetitionThresholds,
}

impl Default for HeuristicConfig {
    fn default() -> Self {
        HeuristicConfig {
            min_words: 50,
            max_words: 100_000,
            max_symbol_word_ratio: 0.1,
            max_ellipsis_line_frac: 0.3,
            max_short_line_frac: 0.67,
            max_incomplete_line_frac: 0.30,
            min_alpha_word_frac: 0.80,
            short_line_max_words: 3,
            repetition: RepetitionThresholds::default(),
        }
    }
}

impl HeuristicConfig {
    pub fn validate(&self) -> Vec<String> {
        let mut errors = Vec::new();
        if self.min_words >= self.max_words {
            errors.push(format!("min_words ({}) must be below max_words ({})", self.min_words, self.max_words));
        }
        let fractions = [
            ("max_ellipsis_line_frac", self.max_ellipsis_line_frac),
            ("max_short_line_frac", self.max_short_line_frac),
            ("max_incomplete_line_frac", self.max_incomplete_line_frac),
            ("min_alpha_word_frac", self.min_alpha_word_frac),
        ];
        for (name, v) in fractions.into_iter().chain(self.repetition.fractions()) {
            if !(0.0..=1.0).contains(&v) {
                errors.push(format!("{name} = {v} is outside [0, 1]"));
            }
        }
        if self.max_symbol_word_ratio < 0.0 {
            errors.push("max_symbol_word_ratio must be non-negative".into());
        }
        errors
    }
}

/// Outcome of running the whole heuristic cascade on one document.
#[derive(Debug, Clone, PartialEq)]
pub struct HeuristicOutcome {
    pub verdict: FilterVerdict,
    pub pii_replacements: usize,
    /// Rewritten text when PII was masked on a kept document.
    pub text: Option<String>,
}

/// Blocklists, then structural rules, then repetition rules; kept documents
/// get PII masked.
#[derive(Debug, Clone, Default)]
pub struct HeuristicFilter {
    pub config: HeuristicConfig,
    pub blocklists: Blocklists,
    pub anonymize: bool,
}

impl HeuristicFilter {
    pub fn new(config: HeuristicConfig, blocklists: Blocklists) -> Self {
        HeuristicFilter { config, blocklists, anonymize: true }
    }

    pub fn evaluate(&self, doc: &Document) -> HeuristicOutcome {
        let dropped = |verdict| HeuristicOutcome { verdict, pii_replacements: 0, text: None };
        let v = apply_blocklists(doc, &self.blocklists);
        if !v.keep {
            return dropped(v);
        }
        let segs = segment(&doc.text);
        let v = structural::structural_verdict_segments(&doc.text, &segs, &self.config);
        if !v.keep {
            return dropped(v);
        }
        let v = repetition_verdict(&repetition_stats(doc), &self.config.repetition);
        if !v.keep {
            return dropped(v);
        }
        let (text, n) = if self.anonymize {
            let (t, n) = anonymize_pii(&doc.text);
            (if n > 0 { Some(t) } else { None }, n)
        } else {
            (None, 0)
        };
        HeuristicOutcome { verdict: v, pii_replacements: n, text }
    }
}
