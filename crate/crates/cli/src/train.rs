use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Subcommand};
use curate::bench::{bench_heuristics, bench_minhash};
use curate::cluster::{default_k, fit_kmeans, ClusterModel, TfidfModel, DEFAULT_CLUSTER_DIM};
use curate::lang::{CharNgramProfile, LangIdConfig, LmConfig, NgramLm, PerplexityBuckets};
use curate::learned::{LinearClassifier, TrainConfig};
use curate::synth::{
    dedup_corpus, default_config, generate_corpus, quality_task, train_models, write_corpus, ModelPaths, SynthConfig,
    TrainSizes,
};
use curate::topic::TopicModel;
use curate::Document;

use crate::util::{key_path, read_all, seed, worker_count, write_json};
use crate::Global;

#[derive(Subcommand)]
pub enum TrainCommand {
    /// Character n-gram language identifier.
    Langid {
        /// LANG=PATH samples, repeatable.
        #[arg(long = "sample", required = true, value_parser = key_path)]
        samples: Vec<(String, PathBuf)>,
        #[arg(long)]
        output: PathBuf,
    },
    /// Kneser-Ney word n-gram language model.
    Lm {
        #[arg(long, required = true, num_args = 1..)]
        input: Vec<PathBuf>,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = 5)]
        order: usize,
        #[arg(long, default_value_t = 2)]
        min_count: u32,
        /// Do not pad sentences with boundary symbols.
        #[arg(long)]
        no_boundaries: bool,
    },
    /// Perplexity tertile boundaries per language.
    Buckets {
        /// LANG=MODEL language models, repeatable.
        #[arg(long = "lm", required = true, value_parser = key_path)]
        models: Vec<(String, PathBuf)>,
        /// Documents with their `lang` set.
        #[arg(long, required = true, num_args = 1..)]
        input: Vec<PathBuf>,
        #[arg(long)]
        output: PathBuf,
        /// Also fit pooled boundaries used for languages without their own.
        #[arg(long)]
        global: bool,
    },
    /// Linear classifier on positives vs negatives (quality or safety).
    Classifier {
        #[arg(long, required = true, num_args = 1..)]
        positives: Vec<PathBuf>,
        #[arg(long, required = true, num_args = 1..)]
        negatives: Vec<PathBuf>,
        #[arg(long)]
        output: PathBuf,
        /// Recorded in the model metadata (quality, safety, ...).
        #[arg(long, default_value = "quality")]
        kind: String,
        #[arg(long)]
        epochs: Option<u32>,
    },
    /// TF-IDF k-means cluster model.
    Clusters {
        #[arg(long, required = true, num_args = 1..)]
        input: Vec<PathBuf>,
        #[arg(long)]
        output: PathBuf,
        /// Number of clusters (default grows with corpus size, at least 16).
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 25)]
        iters: usize,
    },
    /// Naive Bayes topic labeler.
    Topic {
        #[arg(long, required = true, num_args = 1..)]
        input: Vec<PathBuf>,
        #[arg(long)]
        output: PathBuf,
        /// Meta key holding each document's label.
        #[arg(long, default_value = "label")]
        label_key: String,
    },
}

fn texts(docs: &[Document]) -> Vec<&str> {
    docs.iter().map(|d| d.text.as_str()).collect()
}

pub fn train(g: &Global, cmd: TrainCommand) -> Result<bool> {
    match cmd {
        TrainCommand::Langid { samples, output } => {
            let mut docs: Vec<(String, Vec<Document>)> = Vec::new();
            for (lang, path) in samples {
                docs.push((lang, read_all(&[path])?));
            }
            let pairs = docs.iter().flat_map(|(l, ds)| ds.iter().map(move |d| (l.as_str(), d.text.as_str())));
            CharNgramProfile::train(pairs, LangIdConfig::default())?.save(&output)?;
        }
        TrainCommand::Lm { input, output, order, min_count, no_boundaries } => {
            let docs = read_all(&input)?;
            let cfg = LmConfig { order, min_count, boundaries: !no_boundaries };
            NgramLm::train(texts(&docs), cfg)?.save(&output)?;
        }
        TrainCommand::Buckets { models, input, output, global } => {
            let lms: BTreeMap<String, NgramLm> =
                models.into_iter().map(|(l, p)| Ok((l, NgramLm::load(&p)?))).collect::<Result<_>>()?;
            let mut scores: BTreeMap<String, Vec<f64>> = BTreeMap::new();
            for d in read_all(&input)? {
                if let Some((lang, lm)) = d.lang.as_deref().and_then(|l| lms.get_key_value(l)) {
                    scores.entry(lang.clone()).or_default().push(lm.perplexity(&d.text));
                }
            }
            PerplexityBuckets::fit(&scores, global)?.save(&output)?;
        }
        TrainCommand::Classifier { positives, negatives, output, kind, epochs } => {
            let pos = read_all(&positives)?;
            let neg = read_all(&negatives)?;
            let mut cfg = TrainConfig { seed: seed(g), ..Default::default() };
            if let Some(e) = epochs {
                cfg.epochs = e;
            }
            let mut m = LinearClassifier::train(&texts(&pos), &texts(&neg), &cfg)?;
            m.meta.kind = kind;
            m.meta.positive_tag = tag(&positives);
            m.meta.negative_tag = tag(&negatives);
            m.save(&output)?;
        }
        TrainCommand::Clusters { input, output, k, iters } => {
            let docs = read_all(&input)?;
            let tfidf = TfidfModel::fit(texts(&docs), DEFAULT_CLUSTER_DIM);
            let vectors: Vec<_> = docs.iter().map(|d| tfidf.transform(&d.text)).collect();
            let k = k.unwrap_or_else(|| default_k(docs.len()));
            let centroids = fit_kmeans(&vectors, k, iters, seed(g))?;
            ClusterModel { tfidf, centroids }.save(&output)?;
        }
        TrainCommand::Topic { input, output, label_key } => {
            let docs = read_all(&input)?;
            let mut examples = Vec::new();
            for d in &docs {
                match d.meta_str(&label_key) {
                    Some(l) => examples.push((l, d.text.as_str())),
                    None => bail!("document {:?} has no {label_key:?} label", d.id),
                }
            }
            let mut labels: Vec<&str> = examples.iter().map(|e| e.0).collect();
            labels.sort_unstable();
            labels.dedup();
            TopicModel::train(examples.iter().copied(), &labels, curate::topic::DEFAULT_DIM, 1.0)?.save(&output)?;
        }
    }
    println!("model written");
    Ok(true)
}

fn tag(paths: &[PathBuf]) -> String {
    paths.iter().map(|p| p.display().to_string()).collect::<Vec<_>>().join(",")
}

#[derive(Args)]
pub struct SynthArgs {
    /// Directory to fill: input/ shards, and models/ plus pipeline.toml
    /// with --train-models.
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, default_value_t = 10_000)]
    pub docs: usize,
    /// corpus (mixed noise), dedup (planted duplicates) or quality
    /// (reference vs shuffled, written as positives/ and negatives/).
    #[arg(long, default_value = "corpus")]
    pub kind: String,
    /// Also train the default cascade's models and write pipeline.toml.
    #[arg(long)]
    pub train_models: bool,
}

fn relative(models: &ModelPaths, dir: &Path) -> ModelPaths {
    let strip = |p: &Path| p.strip_prefix(dir).map(Path::to_path_buf).unwrap_or_else(|_| p.to_path_buf());
    ModelPaths {
        langid: strip(&models.langid),
        lm: models.lm.iter().map(|(l, p)| (l.clone(), strip(p))).collect(),
        buckets: strip(&models.buckets),
        quality: strip(&models.quality),
        safety: strip(&models.safety),
        clusters: strip(&models.clusters),
        topic: strip(&models.topic),
        tokenizer: strip(&models.tokenizer),
    }
}

pub fn synth(g: &Global, a: SynthArgs) -> Result<bool> {
    let seed = seed(g);
    let shards = g.shards.unwrap_or(4);
    let input = a.output.join("input");
    match a.kind.as_str() {
        "corpus" => {
            write_corpus(&generate_corpus(&SynthConfig { docs: a.docs, seed }), &input, shards)?;
        }
        "dedup" => {
            write_corpus(&dedup_corpus(a.docs, 0.1, 0.1, 10, seed), &input, shards)?;
        }
        "quality" => {
            let (pos, neg) = quality_task(a.docs, seed);
            let as_docs = |texts: Vec<String>, tag: &str| -> Vec<Document> {
                texts.into_iter().enumerate().map(|(i, t)| Document::new(format!("{tag}{i:06}"), t)).collect()
            };
            write_corpus(&as_docs(pos, "p"), &a.output.join("positives"), 1)?;
            write_corpus(&as_docs(neg, "n"), &a.output.join("negatives"), 1)?;
        }
        other => bail!("unknown synthetic corpus kind {other:?} (corpus, dedup, quality)"),
    }
    println!("wrote {} {} documents under {}", a.docs, a.kind, a.output.display());
    if a.train_models {
        let models = train_models(&a.output.join("models"), seed, &TrainSizes::default())?;
        let rel = relative(&models, &a.output);
        let cfg = default_config(Path::new("input"), Path::new("out"), &rel, 8, seed);
        let text = toml::to_string(&cfg).context("serializing pipeline config")?;
        std::fs::write(a.output.join("pipeline.toml"), text)?;
        println!("models and pipeline.toml written under {}", a.output.display());
    }
    Ok(true)
}

#[derive(Args)]
pub struct BenchArgs {
    /// Documents to measure on; a synthetic corpus when absent.
    #[arg(long, num_args = 1..)]
    pub input: Vec<PathBuf>,
    /// Size of the synthetic corpus.
    #[arg(long, default_value_t = 5_000)]
    pub docs: usize,
    /// Minimum measuring time per benchmark, in seconds.
    #[arg(long, default_value_t = 3.0)]
    pub min_seconds: f64,
    /// Write the results as JSON here.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

pub fn bench(g: &Global, a: BenchArgs) -> Result<bool> {
    let docs = if a.input.is_empty() {
        generate_corpus(&SynthConfig { docs: a.docs, seed: seed(g) })
    } else {
        read_all(&a.input)?
    };
    let workers = worker_count(g);
    let results = vec![bench_heuristics(&docs, workers, a.min_seconds)?, bench_minhash(&docs, workers, a.min_seconds)?];
    for r in &results {
        println!("{}", r.to_text());
    }
    if let Some(p) = a.output {
        write_json(&p, &results)?;
    }
    Ok(true)
}
