//! Fixed vocabularies for the synthetic text generators. The lexicon does
//! not depend on any corpus seed, so models trained on one synthetic
//! corpus apply to another.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::topic::LABELS;

const SYLLABLES: [&str; 40] = [
    "ba", "cor", "den", "fal", "gri", "hol", "ist", "jen", "kal", "lum", "mar", "nor", "ost", "pel", "quin", "ras",
    "sel", "tor", "ul", "ven", "wel", "yar", "zen", "bro", "cla", "dri", "fen", "gal", "har", "lin", "mor", "pra",
    "ser", "tan", "vor", "ber", "can", "del", "mil", "ton",
];

const ES_SYLLABLES: [&str; 24] = [
    "ca", "mi", "lo", "de", "ra", "ti", "so", "ne", "gua", "pe", "ri", "ba", "che", "llo", "ña", "que", "go", "ve",
    "zo", "fu", "co", "ma", "da", "la",
];

const HANZI: &str = "的一是不了人我在有他这中大来上国个到说们为子和你地出道也时年得就那要下以生会自着去之过家学对可她里后小么心多天而能好都然没日于起还发成事只作当想看文无开手十用主行方又如前所本见经头面公同三已老从动两长知民样现分将外但身些与高意进把法此实回二理美点月明其种声全工己话儿者向情部正名定女问力机给等几很业最间新什打便位因重被走电四第门相次东政海口使教西再平真听世气信北少关并内加化由却代军产入先山五太水万市眼体别处总才场师书比住员九笑性通目华报立马命张活难神数件安表原车白应路期叫死常提感金何更反合放做系计或司利受光王果亲界及今京务制解各任至清物台象记边共风战干接它许八特觉望直服毛林题建南度统色字请交爱让认算论百吃义科怎元社术结六功指思非流每青管夫连远资队跟带花快条院变联言权往展该领传近留红治决周保达办运武半候七必城父强步完革深区即求品士转量空甚众技轻程告江语英基派满式李息写呢识极令黄德收脸钱党倒未持取设始版双历越史商千片容研像找友孩站广改议形委早房音火际则首单据导影失拿网香似斯专石若兵弟谁校读志飞观争究包组造落视济喜离虽坐集编宝谈府拉黑且随格尽剑讲布杀微怕母调局根曾准团段终乐切级克精哪官示冷域";

const ZH_FUNCTION: [&str; 10] = ["的", "了", "在", "是", "和", "有", "也", "就", "都", "而"];

pub const DETERMINERS: [&str; 8] = ["the", "a", "this", "each", "every", "their", "its", "one"];
pub const PREPOSITIONS: [&str; 10] =
    ["in", "on", "with", "from", "near", "after", "before", "during", "across", "under"];

const COMMON_NOUNS: [&str; 12] =
    ["people", "time", "year", "day", "place", "part", "group", "world", "area", "city", "work", "family"];
const COMMON_VERBS: [&str; 10] =
    ["describes", "shows", "includes", "became", "remains", "follows", "supports", "reached", "created", "found"];
const COMMON_ADJS: [&str; 10] =
    ["new", "large", "small", "early", "local", "major", "several", "different", "important", "common"];

const SEEDS: [(&str, [&str; 10]); 6] = [
    ("ads", ["discount", "sale", "offer", "price", "coupon", "shipping", "deal", "shop", "bonus", "checkout"]),
    ("fiction", ["door", "night", "shadow", "voice", "heart", "window", "dream", "letter", "forest", "castle"]),
    ("forum", ["thread", "reply", "post", "user", "question", "answer", "problem", "issue", "update", "version"]),
    (
        "knowledge",
        ["species", "river", "theory", "element", "century", "mineral", "structure", "region", "history", "process"],
    ),
    (
        "news",
        [
            "minister",
            "election",
            "parliament",
            "reform",
            "council",
            "court",
            "government",
            "policy",
            "vote",
            "official",
        ],
    ),
    ("other", ["recipe", "garden", "weather", "music", "game", "travel", "holiday", "weekend", "sport", "photo"]),
];

pub const UNSAFE_WORDS: [&str; 16] = [
    "kill",
    "weapon",
    "bomb",
    "attack",
    "murder",
    "massacre",
    "gore",
    "torture",
    "explicit",
    "porn",
    "extremist",
    "propaganda",
    "terror",
    "assault",
    "bloodshed",
    "slaughter",
];

pub const ES_FUNCTION: [&str; 16] =
    ["el", "la", "de", "que", "y", "en", "los", "del", "se", "las", "por", "un", "para", "con", "una", "su"];

#[derive(Debug, Clone)]
pub struct TopicWords {
    pub label: &'static str,
    pub nouns: Vec<String>,
    pub verbs: Vec<String>,
    pub adjs: Vec<String>,
    pub zh_words: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct Lexicon {
    pub topics: Vec<TopicWords>,
    pub es_words: Vec<String>,
    pub zh_function: Vec<&'static str>,
    hanzi: Vec<char>,
}

fn pseudo_word(rng: &mut ChaCha8Rng, syllables: &[&str], min: usize, max: usize) -> String {
    let n = rng.gen_range(min..=max);
    (0..n).map(|_| *syllables.choose(rng).expect("syllables")).collect()
}

fn unique_words(
    rng: &mut ChaCha8Rng,
    n: usize,
    suffixes: &[&str],
    taken: &mut std::collections::HashSet<String>,
) -> Vec<String> {
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let w = format!("{}{}", pseudo_word(rng, &SYLLABLES, 2, 3), suffixes.choose(rng).expect("suffixes"));
        if taken.insert(w.clone()) {
            out.push(w);
        }
    }
    out
}

impl Default for Lexicon {
    fn default() -> Self {
        Self::new()
    }
}

impl Lexicon {
    pub fn new() -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(0x006c_6578_6963_6f6e);
        let hanzi: Vec<char> = {
            let mut seen = std::collections::HashSet::new();
            HANZI.chars().filter(|c| seen.insert(*c)).collect()
        };
        let mut taken = std::collections::HashSet::new();
        let mut zh_taken = std::collections::HashSet::new();
        let topics = LABELS
            .iter()
            .map(|&label| {
                let seeds = SEEDS.iter().find(|(l, _)| *l == label).map(|(_, s)| s).expect("seed words");
                let mut nouns: Vec<String> = seeds.iter().map(|s| s.to_string()).collect();
                nouns.extend(unique_words(&mut rng, 110, &["", "a", "on", "ism", "ery"], &mut taken));
                let verbs = unique_words(&mut rng, 40, &["es", "ed", "ates"], &mut taken);
                let adjs = unique_words(&mut rng, 40, &["al", "ic", "ous", "ive"], &mut taken);
                let mut zh_words = Vec::with_capacity(90);
                while zh_words.len() < 90 {
                    let n = rng.gen_range(1..=2);
                    let w: String = (0..n).map(|_| *hanzi.choose(&mut rng).expect("hanzi")).collect();
                    if zh_taken.insert(w.clone()) {
                        zh_words.push(w);
                    }
                }
                TopicWords { label, nouns, verbs, adjs, zh_words }
            })
            .collect();
        let es_words = (0..300)
            .map(|_| {
                let end = ["ción", "ado", "mente", "ero", "idad", "ar"].choose(&mut rng).expect("endings");
                format!("{}{end}", pseudo_word(&mut rng, &ES_SYLLABLES, 1, 3))
            })
            .collect();
        Lexicon { topics, es_words, zh_function: ZH_FUNCTION.to_vec(), hanzi }
    }

    pub fn topic(&self, label: &str) -> &TopicWords {
        self.topics.iter().find(|t| t.label == label).expect("known topic label")
    }

    pub fn common_nouns(&self) -> &'static [&'static str] {
        &COMMON_NOUNS
    }

    pub fn common_verbs(&self) -> &'static [&'static str] {
        &COMMON_VERBS
    }

    pub fn common_adjs(&self) -> &'static [&'static str] {
        &COMMON_ADJS
    }

    pub fn random_hanzi(&self, rng: &mut impl Rng) -> char {
        *self.hanzi.choose(rng).expect("hanzi")
    }

    /// Every English content word of every topic.
    pub fn all_english_words(&self) -> Vec<&str> {
        self.topics.iter().flat_map(|t| t.nouns.iter().chain(&t.verbs).chain(&t.adjs)).map(String::as_str).collect()
    }
}
