//! Unit definitions shared by every ratio filter: lines, paragraphs and
//! words.

use std::ops::Range;

/// Han ideographs, kana and CJK compatibility blocks. Each such codepoint
/// counts as one word.
#[inline]
pub fn is_cjk(c: char) -> bool {
    matches!(c as u32,
        0x3040..=0x30FF        // hiragana, katakana
        | 0x3400..=0x4DBF      // extension A
        | 0x4E00..=0x9FFF      // unified ideographs
        | 0xF900..=0xFAFF      // compatibility ideographs
        | 0x20000..=0x2A6DF    // extension B
        | 0x2A700..=0x2EBEF    // extensions C-F
        | 0x2F800..=0x2FA1F)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segments<'a> {
    pub lines: Vec<&'a str>,
    pub paragraphs: Vec<&'a str>,
    pub words: Vec<&'a str>,
}

pub fn segment(text: &str) -> Segments<'_> {
    Segments {
        lines: text.split('\n').collect(),
        paragraphs: paragraph_spans(text).into_iter().map(|r| &text[r]).collect(),
        words: words(text),
    }
}

#[inline]
fn is_blank(line: &str) -> bool {
    line.trim().is_empty()
}

/// Byte ranges of paragraphs: maximal runs of non-blank lines. A range runs
/// from the start of its first line to the end of its last line, without
/// the trailing newline.
pub fn paragraph_spans(text: &str) -> Vec<Range<usize>> {
    let mut spans = Vec::new();
    let mut current: Option<Range<usize>> = None;
    let mut offset = 0;
    for line in text.split('\n') {
        let start = offset;
        let end = start + line.len();
        offset = end + 1;
        if is_blank(line) {
            if let Some(r) = current.take() {
                spans.push(r);
            }
        } else {
            match &mut current {
                Some(r) => r.end = end,
                None => current = Some(start..end),
            }
        }
    }
    if let Some(r) = current {
        spans.push(r);
    }
    spans
}

/// Calls `f` for every word: whitespace-delimited pieces, with every CJK
/// codepoint split out as a word of its own.
#[inline]
pub fn for_each_word<'a>(text: &'a str, mut f: impl FnMut(&'a str)) {
    for piece in text.split_whitespace() {
        if piece.is_ascii() {
            f(piece);
            continue;
        }
        let mut run_start: Option<usize> = None;
        for (i, c) in piece.char_indices() {
            if is_cjk(c) {
                if let Some(s) = run_start.take() {
                    f(&piece[s..i]);
                }
                f(&piece[i..i + c.len_utf8()]);
            } else if run_start.is_none() {
                run_start = Some(i);
            }
        }
        if let Some(s) = run_start {
            f(&piece[s..]);
        }
    }
}

pub fn words(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    for_each_word(text, |w| out.push(w));
    out
}

pub fn word_count(text: &str) -> usize {
    let mut n = 0;
    for_each_word(text, |_| n += 1);
    n
}

/// Byte ranges of each word in `text`, in order.
pub fn word_spans(text: &str) -> Vec<Range<usize>> {
    let base = text.as_ptr() as usize;
    let mut out = Vec::new();
    for_each_word(text, |w| {
        let start = w.as_ptr() as usize - base;
        out.push(start..start + w.len());
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_segmentation() {
        let s = segment("a b\n\nc");
        assert_eq!(s.lines, vec!["a b", "", "c"]);
        assert_eq!(s.paragraphs, vec!["a b", "c"]);
        assert_eq!(s.words, vec!["a", "b", "c"]);
    }

    #[test]
    fn cjk_words() {
        assert_eq!(segment("你好").words, vec!["你", "好"]);
        assert_eq!(words("hello你好 world"), vec!["hello", "你", "好", "world"]);
        assert_eq!(words("你好，世界"), vec!["你", "好", "，", "世", "界"]);
    }

    #[test]
    fn empty_text() {
        let s = segment("");
        assert_eq!(s.lines, vec![""]);
        assert!(s.paragraphs.is_empty());
        assert!(s.words.is_empty());
    }

    #[test]
    fn paragraphs_span_multiple_lines() {
        let text = "\n\nl1\nl2\n \n\nl3\n";
        let spans = paragraph_spans(text);
        assert_eq!(spans.len(), 2);
        assert_eq!(&text[spans[0].clone()], "l1\nl2");
        assert_eq!(&text[spans[1].clone()], "l3");
    }

    #[test]
    fn word_spans_match_words() {
        let text = "  ab 你c\td ";
        let spans = word_spans(text);
        let via_spans: Vec<&str> = spans.iter().map(|r| &text[r.clone()]).collect();
        assert_eq!(via_spans, words(text));
    }
}
