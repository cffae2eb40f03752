//! Length, symbol, line-shape and garbled-text checks.

use super::segment::{for_each_word, Segments};
use super::{FilterVerdict, HeuristicConfig};
use crate::corpus::Document;

const TERMINAL_PUNCTUATION: &[char] =
    &['.', '!', '?', '"', '\'', '”', '’', '。', '！', '？', '…', ')', '）', '」', '』', '»', ':', ';', '：', '；'];

fn ends_with_ellipsis(line: &str) -> bool {
    line.ends_with("...") || line.ends_with('…')
}

/// Symbol occurrences: maximal runs of `#`, of three or more `.`, or of `…`
/// each count once.
pub fn symbol_count(text: &str) -> usize {
    let b = text.as_bytes();
    let mut count = 0;
    let mut i = 0;
    while i < b.len() {
        match b[i] {
            b'#' => {
                count += 1;
                while i < b.len() && b[i] == b'#' {
                    i += 1;
                }
            }
            b'.' => {
                let start = i;
                while i < b.len() && b[i] == b'.' {
                    i += 1;
                }
                if i - start >= 3 {
                    count += 1;
                }
            }
            // U+2026 is E2 80 A6
            0xE2 if b[i..].starts_with("…".as_bytes()) => {
                count += 1;
                while b[i..].starts_with("…".as_bytes()) {
                    i += 3;
                }
            }
            _ => i += 1,
        }
    }
    count
}

pub fn structural_verdict(doc: &Document, cfg: &HeuristicConfig) -> FilterVerdict {
    let segs = super::segment::segment(&doc.text);
    structural_verdict_segments(&doc.text, &segs, cfg)
}

pub(crate) fn structural_verdict_segments(text: &str, segs: &Segments<'_>, cfg: &HeuristicConfig) -> FilterVerdict {
    let n_words = segs.words.len();
    if n_words < cfg.min_words {
        return FilterVerdict::drop("min_words");
    }
    if n_words > cfg.max_words {
        return FilterVerdict::drop("max_words");
    }
    if n_words > 0 && symbol_count(text) as f64 / n_words as f64 > cfg.max_symbol_word_ratio {
        return FilterVerdict::drop("symbol_word_ratio");
    }

    let mut non_blank = 0usize;
    let mut ellipsis = 0usize;
    let mut incomplete = 0usize;
    let mut short = 0usize;
    for line in &segs.lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        non_blank += 1;
        if ends_with_ellipsis(line) {
            ellipsis += 1;
        }
        if !line.ends_with(TERMINAL_PUNCTUATION) {
            incomplete += 1;
        }
        let mut words = 0;
        for_each_word(line, |_| words += 1);
        if words <= cfg.short_line_max_words {
            short += 1;
        }
    }
    if non_blank > 0 {
        let frac = |k: usize| k as f64 / non_blank as f64;
        if frac(ellipsis) > cfg.max_ellipsis_line_frac {
            return FilterVerdict::drop("ellipsis_lines");
        }
        if frac(incomplete) > cfg.max_incomplete_line_frac {
            return FilterVerdict::drop("incomplete_lines");
        }
        if frac(short) > cfg.max_short_line_frac {
            return FilterVerdict::drop("short_lines");
        }
    }
    if n_words > 0 {
        let alpha = segs.words.iter().filter(|w| w.chars().any(char::is_alphabetic)).count();
        if (alpha as f64 / n_words as f64) < cfg.min_alpha_word_frac {
            return FilterVerdict::drop("alpha_words");
        }
    }
    FilterVerdict::keep()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(text: &str) -> Document {
        Document::new("d", text)
    }

    #[test]
    fn too_short() {
        let v =
            structural_verdict(&doc("one two three four five six seven eight nine ten."), &HeuristicConfig::default());
        assert_eq!(v, FilterVerdict::drop("min_words"));
    }

    #[test]
    fn symbol_ratio() {
        assert_eq!(symbol_count("### ### ###"), 3);
        assert_eq!(symbol_count("wait... what… ok.. #tag"), 3);
        let cfg = HeuristicConfig { min_words: 1, ..Default::default() };
        assert_eq!(structural_verdict(&doc("### ### ###"), &cfg), FilterVerdict::drop("symbol_word_ratio"));
    }

    #[test]
    fn line_shape_rules() {
        let cfg = HeuristicConfig { min_words: 1, ..Default::default() };
        let text = "A complete line of prose ends here.\nthis one has no ending punctuation at all\nand neither does this longer line of words";
        assert_eq!(structural_verdict(&doc(text), &cfg), FilterVerdict::drop("incomplete_lines"));
        let text = "Home.\nAbout.\nContact us.\nA real sentence is here with many words in it.";
        assert_eq!(structural_verdict(&doc(text), &cfg), FilterVerdict::drop("short_lines"));
        let text = "And then there was more and more of the same story...\nIt went on for a long while through the winter...\nThe story continues with plenty of words about the town.";
        assert_eq!(structural_verdict(&doc(text), &cfg), FilterVerdict::drop("ellipsis_lines"));
    }

    #[test]
    fn garbled_text() {
        let cfg = HeuristicConfig { min_words: 1, ..Default::default() };
        let text = "x 12 34 56 %% && 78 90 !! @@ ++.";
        assert_eq!(structural_verdict(&doc(text), &cfg), FilterVerdict::drop("alpha_words"));
    }
}
