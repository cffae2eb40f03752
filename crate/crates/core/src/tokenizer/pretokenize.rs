//! Splitting text into merge-isolated pieces.

use unicode_general_category::{get_general_category, GeneralCategory};

#[inline]
pub fn is_decimal_digit(c: char) -> bool {
    if c.is_ascii() {
        return c.is_ascii_digit();
    }
    get_general_category(c) == GeneralCategory::DecimalNumber
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Class {
    Space,
    Digit,
    Other,
}

fn class(c: char, split_digits: bool) -> Class {
    if c.is_whitespace() {
        Class::Space
    } else if split_digits && is_decimal_digit(c) {
        Class::Digit
    } else {
        Class::Other
    }
}

/// Pieces are maximal runs of non-whitespace, non-digit characters, and
/// single decimal digits. One whitespace character directly before a piece
/// becomes its prefix; any further whitespace forms a piece of its own.
/// Nothing is inserted or normalized, so the pieces concatenate back to the
/// input.
pub fn pretokenize(text: &str, split_digits: bool) -> Vec<&str> {
    let mut pieces = Vec::new();
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let n = chars.len();
    let end_of = |i: usize| if i < n { chars[i].0 } else { text.len() };
    let mut i = 0;
    while i < n {
        let c = chars[i].1;
        match class(c, split_digits) {
            Class::Space => {
                let mut j = i;
                while j < n && class(chars[j].1, split_digits) == Class::Space {
                    j += 1;
                }
                if j == n {
                    pieces.push(&text[chars[i].0..]);
                    break;
                }
                // all but the last whitespace character stand alone
                if j - 1 > i {
                    pieces.push(&text[chars[i].0..chars[j - 1].0]);
                }
                let start = chars[j - 1].0;
                let k = piece_end(&chars, j, split_digits);
                pieces.push(&text[start..end_of(k)]);
                i = k;
            }
            _ => {
                let k = piece_end(&chars, i, split_digits);
                pieces.push(&text[chars[i].0..end_of(k)]);
                i = k;
            }
        }
    }
    pieces
}

/// End (exclusive char index) of the non-whitespace piece starting at `i`.
fn piece_end(chars: &[(usize, char)], i: usize, split_digits: bool) -> usize {
    match class(chars[i].1, split_digits) {
        Class::Digit => i + 1,
        _ => {
            let mut k = i + 1;
            while k < chars.len() && class(chars[k].1, split_digits) == Class::Other {
                k += 1;
            }
            k
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        assert_eq!(pretokenize("2023", true), vec!["2", "0", "2", "3"]);
        assert_eq!(pretokenize("，", true), vec!["，"]);
        assert_eq!(pretokenize("hello", true), vec!["hello"]);
        assert_eq!(pretokenize("a b", true), vec!["a", " b"]);
        assert_eq!(pretokenize("in 2023, ok", true), vec!["in", " 2", "0", "2", "3", ",", " ok"]);
        assert_eq!(pretokenize("a   b ", true), vec!["a", "  ", " b", " "]);
        assert_eq!(pretokenize("x١٢y", true), vec!["x", "١", "٢", "y"]);
        assert_eq!(pretokenize("2023", false), vec!["2023"]);
        assert!(pretokenize("", true).is_empty());
    }

    proptest! {
        #[test]
        fn lossless(s in "\\PC{0,40}") {
            prop_assert_eq!(pretokenize(&s, true).concat(), s.clone());
            for p in pretokenize(&s, true) {
                prop_assert!(p.chars().filter(|&c| is_decimal_digit(c)).count() <= 1);
            }
        }
    }
}
