//! `curate`: command-line front end for the corpus curation toolkit.

mod data;
mod pipeline;
mod train;
mod util;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "curate", version, about = "Pretraining corpus curation: filter, dedup, sample, tokenize, pack")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug, Default)]
pub struct Global {
    /// Pipeline config (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Number of shards; overrides the config.
    #[arg(long, global = true)]
    pub shards: Option<usize>,
    /// Worker threads (0 = all cores); overrides the config.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Global seed; overrides the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Reuse completed stages whose inputs and parameters are unchanged.
    #[arg(long, global = true)]
    pub resume: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Read WET or JSONL files into id-sharded JSONL.
    Ingest(pipeline::IngestArgs),
    /// Run the config's heuristic and language-id stages.
    Filter(pipeline::StepArgs),
    /// Run the config's perplexity, quality, safety and coherence stages.
    Score(pipeline::StepArgs),
    /// Run the config's cluster filter stages.
    Cluster(pipeline::StepArgs),
    /// Run the config's paragraph, MinHash, exact and substring dedup stages.
    Dedup(pipeline::StepArgs),
    /// Run the config's topic down-sampling stages.
    Sample(pipeline::StepArgs),
    /// Run every stage of the config.
    Run(pipeline::RunArgs),
    /// Train a byte-fallback BPE tokenizer.
    TokenizeTrain(data::TokenizeTrainArgs),
    /// Encode documents into a token corpus, or encode/decode one string.
    Tokenize(data::TokenizeArgs),
    /// Pack a token corpus into fixed-length sequences.
    Pack(data::PackArgs),
    /// Build a needle-in-a-haystack grid from a token corpus.
    Haystack(data::HaystackArgs),
    /// Mixture report (docs and tokens by source, language and topic).
    Report(data::ReportArgs),
    /// Train scorer and labeler models.
    #[command(subcommand)]
    Train(train::TrainCommand),
    /// Generate a synthetic corpus, optionally with trained models and a
    /// default pipeline config.
    Synth(train::SynthArgs),
    /// Measure heuristic and MinHash throughput.
    Bench(train::BenchArgs),
}

/// Exit status of a run stopped early on request.
const EXIT_INCOMPLETE: u8 = 2;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).format_timestamp(None).init();
    let cli = Cli::parse();
    let g = &cli.global;
    let result = match cli.command {
        Command::Ingest(a) => pipeline::ingest(g, a),
        Command::Filter(a) => pipeline::step(g, "filter", a),
        Command::Score(a) => pipeline::step(g, "score", a),
        Command::Cluster(a) => pipeline::step(g, "cluster", a),
        Command::Dedup(a) => pipeline::step(g, "dedup", a),
        Command::Sample(a) => pipeline::step(g, "sample", a),
        Command::Run(a) => pipeline::run(g, a),
        Command::TokenizeTrain(a) => data::tokenize_train(g, a),
        Command::Tokenize(a) => data::tokenize(g, a),
        Command::Pack(a) => data::pack(g, a),
        Command::Haystack(a) => data::haystack(g, a),
        Command::Report(a) => data::report(g, a),
        Command::Train(c) => train::train(g, c),
        Command::Synth(a) => train::synth(g, a),
        Command::Bench(a) => train::bench(g, a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_INCOMPLETE),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
