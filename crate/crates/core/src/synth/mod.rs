//! Synthetic corpora with planted structure (noise, duplicates, shared
//! passages, ads, unsafe text) and desk-scale model training on them.
//! Every planted document carries `synth.kind` in its meta.

mod lexicon;
mod text;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use lexicon::{Lexicon, TopicWords, UNSAFE_WORDS};
pub use text::TextGen;

use crate::cluster::{fit_kmeans, ClusterModel, TfidfModel, DEFAULT_CLUSTER_DIM};
use crate::corpus::{write_jsonl_shard, Document};
use crate::error::{Error, Result};
use crate::lang::{CharNgramProfile, LangIdConfig, LmConfig, NgramLm, PerplexityBuckets};
use crate::learned::{LinearClassifier, TrainConfig};
use crate::pipeline::{PipelineConfig, StageSpec};
use crate::tokenizer::{train_bpe, TokenizerConfig};
use crate::topic::{TopicModel, LABELS};

/// Relative weights of planted document kinds in [`generate_corpus`].
pub const KIND_WEIGHTS: [(&str, f64); 19] = [
    ("clean", 0.42),
    ("clean-zh", 0.12),
    ("short", 0.03),
    ("symbols", 0.02),
    ("ellipsis", 0.02),
    ("menu", 0.02),
    ("numeric", 0.02),
    ("repeated-lines", 0.02),
    ("keyword-stuffing", 0.02),
    ("gibberish", 0.03),
    ("shuffled", 0.04),
    ("unsafe", 0.03),
    ("incoherent", 0.03),
    ("foreign", 0.03),
    ("pii", 0.02),
    ("boilerplate", 0.03),
    ("passage", 0.005),
    ("exact-dup", 0.04),
    ("near-dup", 0.035),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub docs: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig { docs: 10_000, seed: 0 }
    }
}

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

struct Planted {
    kind: &'static str,
    topic: Option<&'static str>,
    lang: &'static str,
    source: &'static str,
    text: String,
    /// Index of the document this one copies.
    origin: Option<usize>,
    url: Option<String>,
}

fn pick_kind(r: &mut impl Rng) -> &'static str {
    let total: f64 = KIND_WEIGHTS.iter().map(|k| k.1).sum();
    let mut x = r.gen::<f64>() * total;
    for (k, w) in KIND_WEIGHTS {
        if x < w {
            return k;
        }
        x -= w;
    }
    KIND_WEIGHTS[0].0
}

/// A newsletter-style paragraph shared verbatim by many documents.
pub fn boilerplate(lex: &Lexicon) -> String {
    let mut g = TextGen::new(lex, rng(0, 8));
    g.en_paragraph("ads", 3)
}

/// A 200-word passage shared verbatim by several documents.
pub fn shared_passage(lex: &Lexicon, seed: u64) -> String {
    let mut g = TextGen::new(lex, rng(seed, 7));
    let mut words: Vec<String> = Vec::new();
    while words.len() < 200 {
        words.extend(g.en_sentence("knowledge").split(' ').map(str::to_string));
    }
    words.truncate(199);
    format!("{}.", words.join(" ").trim_end_matches(['.', ',']))
}

fn host(r: &mut impl Rng, lex: &Lexicon) -> String {
    let t = &lex.topics[r.gen_range(0..lex.topics.len())];
    format!("{}.example", t.nouns[r.gen_range(10..t.nouns.len())])
}

struct Shared {
    passage: String,
    boilerplate: String,
}

fn plant(
    kind: &'static str,
    g: &mut TextGen<'_, ChaCha8Rng>,
    shared: &Shared,
    clean: &[usize],
    docs: &[Planted],
) -> Planted {
    let lex = g.lex;
    let topic = LABELS[g.rng.gen_range(0..LABELS.len())];
    let mut p = Planted {
        kind,
        topic: None,
        lang: "en",
        source: "common-crawl",
        text: String::new(),
        origin: None,
        url: Some(format!("https://{}/{}", host(&mut g.rng, lex), g.rng.gen::<u32>())),
    };
    match kind {
        "clean" => {
            p.topic = Some(topic);
            let paragraphs = match topic {
                "fiction" if g.rng.gen_bool(0.5) => {
                    p.source = "books";
                    p.url = None;
                    g.rng.gen_range(8..=20)
                }
                "knowledge" if g.rng.gen_bool(0.5) => {
                    p.source = "wiki";
                    g.rng.gen_range(3..=6)
                }
                _ => g.rng.gen_range(3..=6),
            };
            p.text = g.en_doc(topic, paragraphs);
        }
        "clean-zh" => {
            p.topic = Some(topic);
            p.lang = "zh";
            let n = g.rng.gen_range(3..=5);
            p.text = g.zh_doc(topic, n);
        }
        "short" => p.text = format!("{} {}", g.en_sentence(topic), g.en_sentence(topic)),
        "symbols" => {
            let base = g.en_doc(topic, 3);
            p.text = base
                .split(' ')
                .map(|w| if g.rng.gen_bool(0.25) { format!("### {w}") } else { w.to_string() })
                .collect::<Vec<_>>()
                .join(" ");
        }
        "ellipsis" => {
            p.text = (0..10)
                .map(|_| {
                    let s = g.en_sentence(topic);
                    format!("{}...", s.trim_end_matches('.'))
                })
                .collect::<Vec<_>>()
                .join("\n");
        }
        "menu" => {
            let t = lex.topic(topic);
            let mut lines: Vec<String> = (0..40)
                .map(|_| {
                    let n = g.rng.gen_range(1..=2);
                    (0..n).map(|_| t.nouns.choose(&mut g.rng).expect("nouns").as_str()).collect::<Vec<_>>().join(" ")
                })
                .collect();
            lines.push(g.en_paragraph(topic, 2));
            p.text = lines.join("\n");
        }
        "numeric" => {
            p.text = (0..12)
                .map(|_| {
                    let cells: Vec<String> = (0..8).map(|_| format!("{:.1}", g.rng.gen_range(0.0..1000.0))).collect();
                    format!("{} {}.", lex.topic(topic).nouns.choose(&mut g.rng).expect("nouns"), cells.join(" "))
                })
                .collect::<Vec<_>>()
                .join("\n");
        }
        "repeated-lines" => {
            let line = g.en_sentence(topic);
            let mut lines: Vec<String> = (0..10).map(|_| line.clone()).collect();
            lines.extend((0..4).map(|_| g.en_sentence(topic)));
            p.text = lines.join("\n");
        }
        "keyword-stuffing" => {
            let t = lex.topic(topic);
            let phrase: Vec<&str> = (0..6).map(|_| t.nouns.choose(&mut g.rng).expect("nouns").as_str()).collect();
            let phrase = phrase.join(" ");
            p.text = (0..12)
                .map(|_| format!("{} {phrase}.", g.en_sentence(topic).trim_end_matches('.')))
                .collect::<Vec<_>>()
                .join(" ");
        }
        "gibberish" => p.text = g.gibberish(160),
        "shuffled" => {
            let n = g.rng.gen_range(3..=5);
            let base = g.en_doc(topic, n);
            p.text = g.shuffle_words(&base);
        }
        "unsafe" => {
            p.topic = Some(topic);
            let n = g.rng.gen_range(3..=5);
            p.text = g.unsafe_doc(topic, n);
        }
        "incoherent" => {
            // an article interrupted by an unrelated tag cloud
            let mut labels = LABELS.to_vec();
            labels.shuffle(&mut g.rng);
            let tags: Vec<&str> =
                lex.topic(labels[1]).nouns.choose_multiple(&mut g.rng, 25).map(String::as_str).collect();
            let head = g.en_doc(labels[0], 2);
            let tail = g.en_doc(labels[2], 1);
            p.text = format!("{head}\n\n{}.\n\n{tail}", tags.join(" "));
        }
        "foreign" => {
            p.lang = "es";
            p.text = g.es_doc(4);
        }
        "pii" => {
            p.topic = Some(topic);
            let n = g.rng.gen_range(3..=5);
            let base = g.en_doc(topic, n);
            let user = lex.topic(topic).nouns.choose(&mut g.rng).expect("nouns").clone();
            p.text = format!(
                "{base} Contact {user}@{} or call 415-555-{:04} for details.",
                host(&mut g.rng, lex),
                g.rng.gen_range(0..10_000)
            );
        }
        "boilerplate" => {
            p.topic = Some(topic);
            let n = g.rng.gen_range(3..=5);
            p.text = format!("{}\n\n{}", g.en_doc(topic, n), shared.boilerplate);
        }
        "passage" => {
            p.topic = Some("knowledge");
            let a = g.en_doc("knowledge", 2);
            let b = g.en_doc("knowledge", 2);
            p.text = format!("{a}\n\n{}\n\n{b}", shared.passage);
        }
        "exact-dup" | "near-dup" => {
            let Some(&o) = clean.choose(&mut g.rng) else {
                return plant("clean", g, shared, clean, docs);
            };
            let orig = &docs[o];
            p.topic = orig.topic;
            p.source = orig.source;
            p.origin = Some(o);
            p.text = if kind == "exact-dup" {
                match g.rng.gen_range(0..3) {
                    0 => orig.text.clone(),
                    1 => orig.text.replacen(". ", ".  ", 3),
                    _ => orig.text.to_uppercase(),
                }
            } else {
                loop {
                    let target = g.rng.gen_range(0.78..0.95);
                    let t = g.near_copy(&orig.text, target);
                    let j = crate::dedup::jaccard(&crate::dedup::shingles(&orig.text), &crate::dedup::shingles(&t));
                    if j >= 0.75 {
                        break t;
                    }
                }
            };
        }
        other => unreachable!("unknown kind {other}"),
    }
    p
}

fn finish(planted: Vec<Planted>, r: &mut ChaCha8Rng) -> Vec<Document> {
    let mut ids: Vec<usize> = (0..planted.len()).collect();
    ids.shuffle(r);
    let id_of = |i: usize| format!("d{:07}", ids[i]);
    planted
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let mut d = Document::new(id_of(i), p.text.clone()).with_source(p.source);
            d.url = p.url.clone();
            d.set_meta("synth", "kind", p.kind);
            d.set_meta("synth", "lang", p.lang);
            if let Some(t) = p.topic {
                d.set_meta("synth", "topic", t);
            }
            if let Some(o) = p.origin {
                d.set_meta("synth", "origin", id_of(o));
            }
            d
        })
        .collect()
}

/// The mixed corpus: clean English and Chinese text across six topics,
/// heuristic-bait noise, shuffled and gibberish text, unsafe and
/// incoherent documents, a third language, boilerplate, a shared passage
/// and exact and near duplicates. Documents are returned in id order.
pub fn generate_corpus(cfg: &SynthConfig) -> Vec<Document> {
    let lex = Lexicon::new();
    let shared = Shared { passage: shared_passage(&lex, cfg.seed), boilerplate: boilerplate(&lex) };
    let mut g = TextGen::new(&lex, rng(cfg.seed, 1));
    let mut planted: Vec<Planted> = Vec::with_capacity(cfg.docs);
    let mut clean: Vec<usize> = Vec::new();
    for _ in 0..cfg.docs {
        let kind = pick_kind(&mut g.rng);
        let p = plant(kind, &mut g, &shared, &clean, &planted);
        if p.kind == "clean" && p.source != "books" {
            clean.push(planted.len());
        }
        planted.push(p);
    }
    let mut docs = finish(planted, &mut g.rng);
    docs.sort_by(|a, b| a.id.cmp(&b.id));
    docs
}

/// Clean English documents plus planted exact duplicates (`exact_frac`),
/// near duplicates with word-5-gram Jaccard in [0.75, 0.95] (`near_frac`)
/// and documents sharing one 200-word passage (`passage_docs`).
pub fn dedup_corpus(n: usize, exact_frac: f64, near_frac: f64, passage_docs: usize, seed: u64) -> Vec<Document> {
    let lex = Lexicon::new();
    let shared = Shared { passage: shared_passage(&lex, seed), boilerplate: boilerplate(&lex) };
    let mut g = TextGen::new(&lex, rng(seed, 2));
    let n_exact = (n as f64 * exact_frac).round() as usize;
    let n_near = (n as f64 * near_frac).round() as usize;
    let n_clean = n - n_exact - n_near - passage_docs;
    let mut planted: Vec<Planted> = Vec::with_capacity(n);
    for _ in 0..n_clean {
        let mut p = plant("clean", &mut g, &shared, &[], &planted);
        if p.source == "books" {
            let label = p.topic.expect("clean docs have a topic");
            let paragraphs = g.rng.gen_range(3..=6);
            p.text = g.en_doc(label, paragraphs);
            p.source = "common-crawl";
        }
        planted.push(p);
    }
    let clean: Vec<usize> = (0..n_clean).collect();
    for _ in 0..passage_docs {
        let p = plant("passage", &mut g, &shared, &clean, &planted);
        planted.push(p);
    }
    for kind in std::iter::repeat_n("exact-dup", n_exact).chain(std::iter::repeat_n("near-dup", n_near)) {
        let p = plant(kind, &mut g, &shared, &clean, &planted);
        planted.push(p);
    }
    let mut docs = finish(planted, &mut g.rng);
    docs.sort_by(|a, b| a.id.cmp(&b.id));
    docs
}

/// Reference-like paragraphs (positives) against word-shuffled
/// paragraphs (negatives), `n` of each.
pub fn quality_task(n: usize, seed: u64) -> (Vec<String>, Vec<String>) {
    let lex = Lexicon::new();
    let mut g = TextGen::new(&lex, rng(seed, 3));
    let mut pos = Vec::with_capacity(n);
    let mut neg = Vec::with_capacity(n);
    for _ in 0..n {
        let label = LABELS[g.rng.gen_range(0..LABELS.len())];
        let k = g.rng.gen_range(2..=4);
        pos.push(g.en_doc(label, k));
        let label = LABELS[g.rng.gen_range(0..LABELS.len())];
        let k = g.rng.gen_range(2..=4);
        let base = g.en_doc(label, k);
        neg.push(g.shuffle_words(&base));
    }
    (pos, neg)
}

/// Topic-labeled documents, `per_label` per label and language.
pub fn topic_examples(per_label: usize, seed: u64) -> Vec<(String, String)> {
    let lex = Lexicon::new();
    let mut g = TextGen::new(&lex, rng(seed, 4));
    let mut out = Vec::new();
    for &label in &LABELS {
        for _ in 0..per_label {
            let k = g.rng.gen_range(2..=4);
            out.push((label.to_string(), g.en_doc(label, k)));
            let k = g.rng.gen_range(1..=3);
            out.push((label.to_string(), g.zh_doc(label, k)));
        }
    }
    out
}

/// Writes `docs` as `shards` JSONL files under `dir`, assigning documents
/// round-robin in id order.
pub fn write_corpus(docs: &[Document], dir: &Path, shards: usize) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let shards = shards.max(1);
    let mut parts: Vec<Vec<&Document>> = vec![Vec::new(); shards];
    for (i, d) in docs.iter().enumerate() {
        parts[i % shards].push(d);
    }
    parts
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let path = dir.join(format!("part-{i:05}.jsonl"));
            write_jsonl_shard(p.iter().copied(), &path)?;
            Ok(path)
        })
        .collect()
}

/// Model files of the default cascade.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelPaths {
    pub langid: PathBuf,
    pub lm: BTreeMap<String, PathBuf>,
    pub buckets: PathBuf,
    pub quality: PathBuf,
    pub safety: PathBuf,
    pub clusters: PathBuf,
    pub topic: PathBuf,
    pub tokenizer: PathBuf,
}

impl ModelPaths {
    pub fn in_dir(dir: &Path) -> Self {
        ModelPaths {
            langid: dir.join("langid.json"),
            lm: BTreeMap::from([("en".into(), dir.join("lm-en.json")), ("zh".into(), dir.join("lm-zh.json"))]),
            buckets: dir.join("ppl-buckets.json"),
            quality: dir.join("quality.json"),
            safety: dir.join("safety.json"),
            clusters: dir.join("clusters.json"),
            topic: dir.join("topic.json"),
            tokenizer: dir.join("tokenizer.json"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainSizes {
    pub lm_docs: usize,
    pub classifier_docs: usize,
    pub calibration_docs: usize,
    pub cluster_docs: usize,
    pub clusters: usize,
    pub topic_per_label: usize,
    pub tokenizer_docs: usize,
    pub vocab_size: usize,
}

impl Default for TrainSizes {
    fn default() -> Self {
        TrainSizes {
            lm_docs: 1500,
            classifier_docs: 1000,
            calibration_docs: 2000,
            cluster_docs: 2000,
            clusters: 16,
            topic_per_label: 100,
            tokenizer_docs: 400,
            vocab_size: 4000,
        }
    }
}

/// Trains every model of the default cascade on synthetic data drawn from
/// streams independent of [`generate_corpus`] with the same seed.
pub fn train_models(dir: &Path, seed: u64, sizes: &TrainSizes) -> Result<ModelPaths> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let paths = ModelPaths::in_dir(dir);
    let lex = Lexicon::new();
    let mut g = TextGen::new(&lex, rng(seed, 10));
    let random_label = |r: &mut ChaCha8Rng| LABELS[r.gen_range(0..LABELS.len())];

    let mut en = Vec::new();
    let mut zh = Vec::new();
    for _ in 0..sizes.lm_docs {
        let l = random_label(&mut g.rng);
        let k = g.rng.gen_range(2..=5);
        en.push(g.en_doc(l, k));
        if zh.len() * 3 < en.len() {
            let k = g.rng.gen_range(2..=4);
            zh.push(g.zh_doc(l, k));
        }
    }
    let es: Vec<String> = (0..200).map(|_| g.es_doc(3)).collect();

    let mut lang_samples: Vec<(&str, &str)> = Vec::new();
    lang_samples.extend(en.iter().take(300).map(|t| ("en", t.as_str())));
    lang_samples.extend(zh.iter().take(300).map(|t| ("zh", t.as_str())));
    lang_samples.extend(es.iter().map(|t| ("es", t.as_str())));
    CharNgramProfile::train(lang_samples, LangIdConfig::default())?.save(&paths.langid)?;

    let lm_en = NgramLm::train(en.iter().map(String::as_str), LmConfig::default())?;
    let lm_zh = NgramLm::train(zh.iter().map(String::as_str), LmConfig::default())?;
    lm_en.save(&paths.lm["en"])?;
    lm_zh.save(&paths.lm["zh"])?;

    // calibrate on text shaped like the corpus that reaches the scorer
    let calib = generate_corpus(&SynthConfig { docs: sizes.calibration_docs, seed: seed ^ 0x6361_6c69_6272 });
    let mut scores: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for d in &calib {
        match d.meta_str("synth.lang") {
            Some("en") => scores.entry("en".into()).or_default().push(lm_en.perplexity(&d.text)),
            Some("zh") => scores.entry("zh".into()).or_default().push(lm_zh.perplexity(&d.text)),
            _ => {}
        }
    }
    PerplexityBuckets::fit(&scores, false)?.save(&paths.buckets)?;

    let n = sizes.classifier_docs;
    let mut pos: Vec<String> = Vec::with_capacity(n);
    let mut neg: Vec<String> = Vec::with_capacity(n);
    let mut unsafe_docs: Vec<String> = Vec::with_capacity(n);
    for i in 0..n {
        let l = random_label(&mut g.rng);
        let k = g.rng.gen_range(2..=5);
        pos.push(if i % 4 == 3 { g.zh_doc(l, k) } else { g.en_doc(l, k) });
        let base = g.en_doc(l, k);
        neg.push(match i % 5 {
            0 => g.gibberish(120),
            _ => g.shuffle_words(&base),
        });
        unsafe_docs.push(g.unsafe_doc(l, k));
    }
    let p: Vec<&str> = pos.iter().map(String::as_str).collect();
    let q: Vec<&str> = neg.iter().map(String::as_str).collect();
    let u: Vec<&str> = unsafe_docs.iter().map(String::as_str).collect();
    let train_cfg = TrainConfig { seed, ..Default::default() };
    let mut quality = LinearClassifier::train(&p, &q, &train_cfg)?;
    quality.meta.kind = "quality".into();
    quality.meta.positive_tag = "reference".into();
    quality.meta.negative_tag = "shuffled+gibberish".into();
    quality.save(&paths.quality)?;
    let mut safety = LinearClassifier::train(&p, &u, &train_cfg)?;
    safety.meta.kind = "safety".into();
    safety.meta.positive_tag = "safe".into();
    safety.meta.negative_tag = "unsafe".into();
    safety.save(&paths.safety)?;

    let sample = generate_corpus(&SynthConfig { docs: sizes.cluster_docs, seed: seed ^ 0x636c_7573 });
    let tfidf = TfidfModel::fit(sample.iter().map(|d| d.text.as_str()), DEFAULT_CLUSTER_DIM);
    let vectors: Vec<_> = sample.iter().map(|d| tfidf.transform(&d.text)).collect();
    let centroids = fit_kmeans(&vectors, sizes.clusters, 25, seed)?;
    ClusterModel { tfidf, centroids }.save(&paths.clusters)?;

    let examples = topic_examples(sizes.topic_per_label, seed ^ 0x746f_7069);
    let topic = TopicModel::train(
        examples.iter().map(|(l, t)| (l.as_str(), t.as_str())),
        &LABELS,
        crate::topic::DEFAULT_DIM,
        1.0,
    )?;
    topic.save(&paths.topic)?;

    let tok_texts: Vec<&str> = en
        .iter()
        .take(sizes.tokenizer_docs)
        .chain(zh.iter().take(sizes.tokenizer_docs / 3))
        .map(String::as_str)
        .collect();
    let tok = train_bpe(tok_texts, &TokenizerConfig { vocab_size: sizes.vocab_size, ..Default::default() })?;
    tok.save(&paths.tokenizer)?;
    Ok(paths)
}

/// The full cascade in its default order: heuristics, language id,
/// perplexity, quality, safety, coherence, cluster filter, paragraph,
/// MinHash, exact and substring dedup, topic down-sampling.
pub fn default_cascade(models: &ModelPaths) -> Vec<StageSpec> {
    let path = |p: &Path| toml::Value::String(p.to_string_lossy().into_owned());
    let mut lm = toml::Table::new();
    for (lang, p) in &models.lm {
        lm.insert(lang.clone(), path(p));
    }
    vec![
        StageSpec::new("heuristic"),
        StageSpec::new("langid").with("model", path(&models.langid)),
        StageSpec::new("perplexity").with("models", toml::Value::Table(lm)).with("buckets", path(&models.buckets)),
        StageSpec::new("quality").with("model", path(&models.quality)),
        StageSpec::new("safety").with("model", path(&models.safety)),
        StageSpec::new("coherence"),
        StageSpec::new("cluster").with("model", path(&models.clusters)),
        StageSpec::new("paragraph_dedup"),
        StageSpec::new("minhash_dedup"),
        StageSpec::new("exact_dedup"),
        StageSpec::new("substring_dedup"),
        StageSpec::new("topic_sample").with("model", path(&models.topic)),
    ]
}

/// A pipeline over `input` running [`default_cascade`], with token counts
/// from the trained tokenizer.
pub fn default_config(input: &Path, output: &Path, models: &ModelPaths, shards: usize, seed: u64) -> PipelineConfig {
    PipelineConfig {
        input: vec![input.to_path_buf()],
        output: output.to_path_buf(),
        work_dir: None,
        shards,
        workers: 0,
        seed,
        tokenizer: Some(models.tokenizer.clone()),
        stages: default_cascade(models),
        provided_meta: Vec::new(),
    }
}
