use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use curate::mixer::{
    default_depths, default_lengths, haystack_grid, length_upsample, pack_sequences, write_grid, write_packed,
    NeedleSpec, UpsampleWeights,
};
use curate::pipeline::{count_docs, report_mixture, MixtureReport, TokenCounter};
use curate::tokenizer::{read_token_corpus, train_bpe, TokenCorpusWriter, Tokenizer, TokenizerConfig};

use crate::util::{load_config, read_all, seed, write_json};
use crate::Global;

#[derive(Args)]
pub struct TokenizeTrainArgs {
    /// Training documents (JSONL or WET files, or directories).
    #[arg(long, required = true, num_args = 1..)]
    pub input: Vec<PathBuf>,
    /// Tokenizer model file to write.
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, default_value_t = curate::tokenizer::DEFAULT_VOCAB_SIZE)]
    pub vocab_size: usize,
    #[arg(long)]
    pub character_coverage: Option<f64>,
    #[arg(long)]
    pub min_pair_count: Option<u64>,
}

pub fn tokenize_train(_g: &Global, a: TokenizeTrainArgs) -> Result<bool> {
    let docs = read_all(&a.input)?;
    let mut cfg = TokenizerConfig { vocab_size: a.vocab_size, ..Default::default() };
    if let Some(c) = a.character_coverage {
        cfg.character_coverage = c;
    }
    if let Some(m) = a.min_pair_count {
        cfg.min_pair_count = m;
    }
    let tok = train_bpe(docs.iter().map(|d| d.text.as_str()), &cfg)?;
    tok.save(&a.output)?;
    println!("trained {} pieces on {} documents -> {}", tok.vocab_size(), docs.len(), a.output.display());
    Ok(true)
}

#[derive(Args)]
pub struct TokenizeArgs {
    /// Tokenizer model; defaults to the config's tokenizer.
    #[arg(long)]
    pub tokenizer: Option<PathBuf>,
    /// Print the ids of one string as JSON.
    #[arg(long, conflicts_with_all = ["decode", "input"])]
    pub text: Option<String>,
    /// Print the text of comma-separated ids.
    #[arg(long, conflicts_with = "input")]
    pub decode: Option<String>,
    /// Documents to encode into a token corpus.
    #[arg(long, num_args = 1..)]
    pub input: Vec<PathBuf>,
    /// Token corpus file to write.
    #[arg(long, requires = "input")]
    pub output: Option<PathBuf>,
}

fn tokenizer_path(g: &Global, explicit: Option<PathBuf>) -> Result<Option<PathBuf>> {
    if explicit.is_some() {
        return Ok(explicit);
    }
    Ok(load_config(g, &[], None)?.tokenizer)
}

pub fn tokenize(g: &Global, a: TokenizeArgs) -> Result<bool> {
    let Some(path) = tokenizer_path(g, a.tokenizer)? else {
        bail!("no tokenizer given (--tokenizer or the config's tokenizer)");
    };
    let tok = Tokenizer::load(&path)?;
    if let Some(text) = a.text {
        println!("{}", serde_json::to_string(&tok.encode(&text))?);
        return Ok(true);
    }
    if let Some(ids) = a.decode {
        let ids: Vec<u32> = ids
            .split(',')
            .map(|s| s.trim().parse::<u32>())
            .collect::<Result<_, _>>()
            .context("--decode takes comma-separated token ids")?;
        println!("{}", tok.decode(&ids)?);
        return Ok(true);
    }
    let Some(out) = a.output else {
        bail!("give --text, --decode, or --input with --output");
    };
    let docs = read_all(&a.input)?;
    let mut w = TokenCorpusWriter::create(&out)?;
    let mut tokens = 0u64;
    for d in &docs {
        let ids = tok.encode(&d.text);
        tokens += ids.len() as u64;
        w.write(&d.id, &ids)?;
    }
    w.finish()?;
    println!("encoded {} documents, {tokens} tokens -> {}", docs.len(), out.display());
    Ok(true)
}

#[derive(Args)]
pub struct PackArgs {
    /// Token corpus to pack.
    #[arg(long)]
    pub tokens: PathBuf,
    /// Packed sequence file to write.
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, default_value_t = 4096)]
    pub seq_len: usize,
    /// Repeat documents by length bucket before packing.
    #[arg(long)]
    pub upsample: bool,
    /// Ascending token-count bucket boundaries for --upsample.
    #[arg(long, value_delimiter = ',', requires = "upsample")]
    pub boundaries: Option<Vec<usize>>,
    /// Per-bucket weights for --upsample, one more than the boundaries.
    #[arg(long, value_delimiter = ',', requires = "upsample")]
    pub weights: Option<Vec<f64>>,
    /// Pack in seeded hash order instead of input order.
    #[arg(long)]
    pub shuffle: bool,
}

pub fn pack(g: &Global, a: PackArgs) -> Result<bool> {
    let mut docs = read_token_corpus(&a.tokens)?;
    if a.upsample {
        let mut w = UpsampleWeights { seed: seed(g), ..Default::default() };
        if let Some(b) = a.boundaries {
            w.boundaries = b;
        }
        if let Some(x) = a.weights {
            w.weights = x;
        }
        let errors = w.validate();
        if !errors.is_empty() {
            bail!("invalid upsampling weights: {}", errors.join("; "));
        }
        let lens: Vec<(&str, usize)> = docs.iter().map(|(id, t)| (id.as_str(), t.len())).collect();
        let copies = length_upsample(&lens, &w);
        docs = copies.into_iter().map(|(i, id)| (id, docs[i].1.clone())).collect();
    }
    let seqs = pack_sequences(&docs, a.seq_len, a.shuffle.then(|| seed(g)))?;
    write_packed(&a.output, a.seq_len, &seqs)?;
    println!(
        "packed {} documents into {} sequences of {} -> {}",
        docs.len(),
        seqs.len(),
        a.seq_len,
        a.output.display()
    );
    Ok(true)
}

#[derive(Args)]
pub struct HaystackArgs {
    /// Token corpus supplying the filler text.
    #[arg(long)]
    pub tokens: PathBuf,
    /// Tokenizer that encodes the needle; defaults to the config's.
    #[arg(long)]
    pub tokenizer: Option<PathBuf>,
    /// Directory for haystack.tokens and haystack.jsonl.
    #[arg(long)]
    pub output: PathBuf,
    /// Context lengths in tokens (default: ten from 1K to 16K).
    #[arg(long, value_delimiter = ',')]
    pub lengths: Option<Vec<usize>>,
    /// Needle depths in [0, 1] (default: ten from 0 to 1).
    #[arg(long, value_delimiter = ',')]
    pub depths: Option<Vec<f64>>,
    #[arg(long)]
    pub needle: Option<String>,
    #[arg(long)]
    pub question: Option<String>,
    #[arg(long)]
    pub answer: Option<String>,
}

pub fn haystack(g: &Global, a: HaystackArgs) -> Result<bool> {
    let Some(path) = tokenizer_path(g, a.tokenizer)? else {
        bail!("no tokenizer given (--tokenizer or the config's tokenizer)");
    };
    let tok = Tokenizer::load(&path)?;
    let corpus: Vec<Vec<u32>> = read_token_corpus(&a.tokens)?.into_iter().map(|(_, t)| t).collect();
    let mut spec = NeedleSpec::default();
    if let Some(n) = a.needle {
        spec.needle = n;
    }
    if let Some(q) = a.question {
        spec.question = q;
    }
    if let Some(x) = a.answer {
        spec.answer = x;
    }
    let lengths = a.lengths.unwrap_or_else(default_lengths);
    let depths = a.depths.unwrap_or_else(default_depths);
    let grid = haystack_grid(&corpus, &tok, &spec, &lengths, &depths, seed(g))?;
    std::fs::create_dir_all(&a.output).with_context(|| format!("creating {}", a.output.display()))?;
    write_grid(&grid, &a.output.join("haystack.tokens"), &a.output.join("haystack.jsonl"))?;
    println!("wrote {} haystack instances -> {}", grid.len(), a.output.display());
    Ok(true)
}

#[derive(Args)]
pub struct ReportArgs {
    /// Documents to report on.
    #[arg(long, num_args = 1..)]
    pub input: Vec<PathBuf>,
    /// Tokenizer for token counts; defaults to the config's.
    #[arg(long)]
    pub tokenizer: Option<PathBuf>,
    /// Count words instead of tokens when no tokenizer is available.
    #[arg(long)]
    pub words: bool,
    /// Meta key holding the topic label; defaults to the config's topic
    /// sampling stage label.
    #[arg(long)]
    pub topic_key: Option<String>,
    /// Directory for mixture.txt and mixture.json; stdout only without it.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

pub fn report(g: &Global, a: ReportArgs) -> Result<bool> {
    let cfg = load_config(g, &a.input, None)?;
    let topic_key = a.topic_key.unwrap_or_else(|| cfg.topic_key());
    let input = cfg.input;
    let docs = read_all(&input)?;
    let tok = tokenizer_path(g, a.tokenizer)?.map(|p| Tokenizer::load(&p)).transpose()?;
    let report = match (&tok, a.words) {
        (None, true) => {
            let counter = TokenCounter::Words;
            let unit = counter.unit();
            MixtureReport::from_counts(&count_docs(&docs, counter, &topic_key), unit)
        }
        _ => report_mixture(&docs, tok.as_ref(), &topic_key)?,
    };
    let text = report.to_text();
    print!("{text}");
    if let Some(dir) = a.output {
        write_json(&dir.join("mixture.json"), &report)?;
        std::fs::write(dir.join("mixture.txt"), &text)?;
    }
    Ok(true)
}
