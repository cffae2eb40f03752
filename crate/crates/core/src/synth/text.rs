//! Sentence, paragraph and document generators.

use rand::seq::SliceRandom;
use rand::Rng;

use super::lexicon::{Lexicon, DETERMINERS, ES_FUNCTION, PREPOSITIONS, UNSAFE_WORDS};

pub struct TextGen<'a, R> {
    pub lex: &'a Lexicon,
    pub rng: R,
    /// Nouns the current document keeps coming back to.
    focus: Vec<&'a str>,
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

impl<'a, R: Rng> TextGen<'a, R> {
    pub fn new(lex: &'a Lexicon, rng: R) -> Self {
        TextGen { lex, rng, focus: Vec::new() }
    }

    fn pick<'b>(&mut self, topic: &'b [String], common: &'b [&'b str]) -> &'b str {
        if self.rng.gen_bool(0.75) {
            topic.choose(&mut self.rng).expect("words")
        } else {
            common.choose(&mut self.rng).expect("words")
        }
    }

    fn noun(&mut self, t: &'a super::lexicon::TopicWords) -> &'a str {
        if !self.focus.is_empty() && self.rng.gen_bool(0.6) {
            self.focus[self.rng.gen_range(0..self.focus.len())]
        } else {
            self.pick(&t.nouns, self.lex.common_nouns())
        }
    }

    fn set_focus(&mut self, label: &str) {
        let t = self.lex.topic(label);
        self.focus = t.nouns.choose_multiple(&mut self.rng, 3).map(String::as_str).collect();
    }

    pub fn en_sentence(&mut self, label: &str) -> String {
        let lex = self.lex;
        let t = lex.topic(label);
        let template = self.rng.gen_range(0..6);
        let slots: &[&str] = match template {
            0 => &["D", "A", "N", "V", "D", "N", "P", "D", "N"],
            1 => &["D", "N", "of", "D", "N", "V", "D", "A", "N"],
            2 => &["P", "D", "N,", "D", "N", "V", "D", "N", "and", "D", "A", "N"],
            3 => &["D", "N", "V", "that", "D", "A", "N", "V", "D", "N"],
            4 => &["D", "A", "N", "V", "P", "D", "N", "P", "Y"],
            _ => &["D", "N", "and", "D", "N", "V", "D", "A", "N", "P", "D", "N"],
        };
        let mut words: Vec<String> = Vec::with_capacity(slots.len());
        for &s in slots {
            let w = match s {
                "D" => DETERMINERS.choose(&mut self.rng).expect("det").to_string(),
                "P" => PREPOSITIONS.choose(&mut self.rng).expect("prep").to_string(),
                "N" => self.noun(t).to_string(),
                "N," => format!("{},", self.noun(t)),
                "V" => self.pick(&t.verbs, lex.common_verbs()).to_string(),
                "A" => self.pick(&t.adjs, lex.common_adjs()).to_string(),
                "Y" => self.rng.gen_range(1800..2024).to_string(),
                lit => lit.to_string(),
            };
            words.push(w);
        }
        let mut s = capitalize(&words.join(" "));
        s.push('.');
        s
    }

    fn paragraph(&mut self, label: &str, sentences: usize) -> String {
        (0..sentences).map(|_| self.en_sentence(label)).collect::<Vec<_>>().join(" ")
    }

    /// A paragraph about its own handful of subjects.
    pub fn en_paragraph(&mut self, label: &str, sentences: usize) -> String {
        self.set_focus(label);
        let p = self.paragraph(label, sentences);
        self.focus.clear();
        p
    }

    /// Paragraphs of 3 to 6 sentences about the same handful of subjects,
    /// joined by blank lines.
    pub fn en_doc(&mut self, label: &str, paragraphs: usize) -> String {
        self.set_focus(label);
        let doc = (0..paragraphs)
            .map(|_| {
                let n = self.rng.gen_range(3..=6);
                self.paragraph(label, n)
            })
            .collect::<Vec<_>>()
            .join("\n\n");
        self.focus.clear();
        doc
    }

    pub fn zh_sentence(&mut self, label: &str) -> String {
        let t = self.lex.topic(label);
        let n = self.rng.gen_range(5..=10);
        let mut s = String::new();
        for i in 0..n {
            s.push_str(t.zh_words.choose(&mut self.rng).expect("zh words"));
            if self.rng.gen_bool(0.4) {
                s.push_str(self.lex.zh_function.choose(&mut self.rng).expect("zh function"));
            }
            if i == n / 2 {
                s.push('，');
            }
        }
        s.push('。');
        s
    }

    pub fn zh_doc(&mut self, label: &str, paragraphs: usize) -> String {
        (0..paragraphs)
            .map(|_| {
                let n = self.rng.gen_range(3..=5);
                (0..n).map(|_| self.zh_sentence(label)).collect::<String>()
            })
            .collect::<Vec<_>>()
            .join("\n\n")
    }

    pub fn es_doc(&mut self, paragraphs: usize) -> String {
        (0..paragraphs)
            .map(|_| {
                let n = self.rng.gen_range(3..=5);
                (0..n)
                    .map(|_| {
                        let len = self.rng.gen_range(8..=14);
                        let words: Vec<&str> = (0..len)
                            .map(|_| {
                                if self.rng.gen_bool(0.45) {
                                    *ES_FUNCTION.choose(&mut self.rng).expect("es")
                                } else {
                                    self.lex.es_words.choose(&mut self.rng).expect("es").as_str()
                                }
                            })
                            .collect();
                        format!("{}.", capitalize(&words.join(" ")))
                    })
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect::<Vec<_>>()
            .join("\n\n")
    }

    /// Same words, random order, one paragraph per original paragraph.
    pub fn shuffle_words(&mut self, text: &str) -> String {
        text.split("\n\n")
            .map(|p| {
                let mut w: Vec<&str> = p.split_whitespace().map(|w| w.trim_end_matches(['.', ','])).collect();
                w.shuffle(&mut self.rng);
                format!("{}.", w.join(" "))
            })
            .collect::<Vec<_>>()
            .join("\n\n")
    }

    /// Syllable soup without function words.
    pub fn gibberish(&mut self, words: usize) -> String {
        let all = self.lex.all_english_words();
        let mut lines = Vec::new();
        let mut left = words;
        while left > 0 {
            let n = left.min(self.rng.gen_range(10..20));
            let w: Vec<String> = (0..n)
                .map(|_| {
                    let a = all.choose(&mut self.rng).expect("words");
                    let b = all.choose(&mut self.rng).expect("words");
                    format!("{}{}", &a[..a.len() / 2], &b[b.len() / 2..])
                })
                .collect();
            lines.push(format!("{}.", w.join(" ")));
            left -= n;
        }
        lines.join("\n\n")
    }

    /// A clean document with violent or explicit vocabulary mixed in.
    pub fn unsafe_doc(&mut self, label: &str, paragraphs: usize) -> String {
        let base = self.en_doc(label, paragraphs);
        base.split(' ')
            .map(|w| {
                if self.rng.gen_bool(0.06) {
                    format!("{} {w}", UNSAFE_WORDS.choose(&mut self.rng).expect("unsafe"))
                } else {
                    w.to_string()
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Replaces random words until the word-5-gram Jaccard similarity to
    /// the original falls to `target` or below.
    pub fn near_copy(&mut self, text: &str, target: f64) -> String {
        let all = self.lex.all_english_words();
        let original = crate::dedup::shingles(text);
        let mut words: Vec<String> = text.split(' ').map(str::to_string).collect();
        loop {
            let i = self.rng.gen_range(0..words.len());
            if words[i].contains('\n') {
                continue;
            }
            words[i] = all.choose(&mut self.rng).expect("words").to_string();
            let candidate = words.join(" ");
            let j = crate::dedup::jaccard(&original, &crate::dedup::shingles(&candidate));
            if j <= target {
                return candidate;
            }
        }
    }
}
