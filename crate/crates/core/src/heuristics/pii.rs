//! Email and phone-number masking.

use std::sync::OnceLock;

use regex::Regex;

pub const EMAIL_MASK: &str = "[EMAIL]";
pub const PHONE_MASK: &str = "[PHONE]";

fn email_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"[A-Za-z0-9._%+\-]+@[A-Za-z0-9\-]+(?:\.[A-Za-z0-9\-]+)*\.[A-Za-z]{2,}").expect("static regex")
    })
}

/// Replaces emails with `[EMAIL]` and phone numbers with `[PHONE]`,
/// returning the rewritten text and the number of replacements.
pub fn anonymize_pii(text: &str) -> (String, usize) {
    let re = email_re();
    let mut emails = 0;
    let after_email = if text.contains('@') {
        re.replace_all(text, |_: &regex::Captures| {
            emails += 1;
            EMAIL_MASK
        })
        .into_owned()
    } else {
        text.to_string()
    };
    let (out, phones) = mask_phones(&after_email);
    (out, emails + phones)
}

#[derive(Debug, Clone, Copy)]
struct Group {
    digits: usize,
    end: usize,
    paren: bool,
}

const SEPARATORS: [u8; 3] = *b" -.";

/// Reads digit groups starting at `start`; returns (leading '+', groups,
/// end of the scanned region).
fn scan_groups(b: &[u8], start: usize) -> (bool, Vec<Group>, usize) {
    let mut pos = start;
    let plus = b[pos] == b'+';
    if plus {
        pos += 1;
    }
    let mut groups: Vec<Group> = Vec::new();
    loop {
        let group_start = pos;
        if pos < b.len() && b[pos] == b'(' {
            let mut p = pos + 1;
            while p < b.len() && b[p].is_ascii_digit() {
                p += 1;
            }
            let d = p - pos - 1;
            if (1..=4).contains(&d) && p < b.len() && b[p] == b')' {
                pos = p + 1;
                groups.push(Group { digits: d, end: pos, paren: true });
            } else {
                break;
            }
        } else {
            while pos < b.len() && b[pos].is_ascii_digit() {
                pos += 1;
            }
            if pos == group_start {
                break;
            }
            groups.push(Group { digits: pos - group_start, end: pos, paren: false });
        }
        let last_paren = groups.last().is_some_and(|g| g.paren);
        let digit_or_paren = |p: usize| p < b.len() && (b[p].is_ascii_digit() || b[p] == b'(');
        if pos < b.len() && SEPARATORS.contains(&b[pos]) && digit_or_paren(pos + 1) {
            pos += 1;
        } else if !(last_paren && digit_or_paren(pos)) {
            break;
        }
    }
    let end = groups.last().map_or(pos, |g| g.end);
    (plus, groups, end.max(start + plus as usize))
}

fn phone_shape(plus: bool, groups: &[Group]) -> bool {
    let total: usize = groups.iter().map(|g| g.digits).sum();
    if !(7..=15).contains(&total) {
        return false;
    }
    let last = groups[groups.len() - 1];
    if plus {
        return last.digits >= 2;
    }
    if groups.len() < 2 || last.digits < 3 || groups.iter().any(|g| g.digits > 4) {
        return false;
    }
    if groups.len() == 2 {
        return (groups[0].digits == 3 || groups[0].paren) && last.digits == 4;
    }
    // "1 000 000": digit grouping of a plain number, not a phone
    !groups[1..].iter().all(|g| g.digits == 3)
}

fn mask_phones(text: &str) -> (String, usize) {
    let b = text.as_bytes();
    if !b.iter().any(u8::is_ascii_digit) {
        return (text.to_string(), 0);
    }
    let mut out = String::with_capacity(text.len());
    let mut count = 0;
    let mut copied = 0;
    let mut i = 0;
    while i < b.len() {
        let c = b[i];
        let starts = c.is_ascii_digit() || c == b'(' || (c == b'+' && b.get(i + 1).is_some_and(u8::is_ascii_digit));
        if !starts {
            i += 1;
            continue;
        }
        // Boundary is judged against the output so far, which makes the
        // masking idempotent.
        let prev = if i > copied { text[..i].chars().next_back() } else { out.chars().next_back() };
        let prev_ok = prev.is_none_or(|p| !p.is_alphanumeric());
        if !prev_ok {
            i += 1;
            continue;
        }
        let (plus, groups, scanned_end) = scan_groups(b, i);
        let mut matched = None;
        for k in (1..=groups.len()).rev() {
            let end = groups[k - 1].end;
            let next_ok = text[end..].chars().next().is_none_or(|n| !n.is_alphanumeric());
            if next_ok && phone_shape(plus, &groups[..k]) {
                matched = Some(end);
                break;
            }
        }
        match matched {
            Some(end) => {
                out.push_str(&text[copied..i]);
                out.push_str(PHONE_MASK);
                copied = end;
                count += 1;
                i = end;
            }
            None => i = scanned_end.max(i + 1),
        }
    }
    out.push_str(&text[copied..]);
    (out, count)
}
