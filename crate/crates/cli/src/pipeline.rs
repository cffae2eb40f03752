use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::Args;
use curate::pipeline::{ingest_to_shards, run_pipeline, stage_group, validate_config, PipelineConfig, RunOptions};

use crate::util::load_config;
use crate::Global;

#[derive(Args)]
pub struct IngestArgs {
    /// WET (`.wet`, `.wet.gz`) or JSONL files, or directories of them.
    #[arg(long, required = true, num_args = 1..)]
    pub input: Vec<PathBuf>,
    /// Directory for the JSONL shards.
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Args)]
pub struct StepArgs {
    /// Input shards or files; defaults to the config's input.
    #[arg(long, num_args = 1..)]
    pub input: Vec<PathBuf>,
    /// Output directory; defaults to `<config output>/<step>`.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args)]
pub struct RunArgs {
    /// Input shards or files; defaults to the config's input.
    #[arg(long, num_args = 1..)]
    pub input: Vec<PathBuf>,
    /// Output directory; defaults to the config's output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Stop once the named stage is complete (exit status 2).
    #[arg(long)]
    pub stop_after: Option<String>,
}

pub fn ingest(g: &Global, a: IngestArgs) -> Result<bool> {
    let shards = g.shards.unwrap_or(8);
    let (docs, skipped) = ingest_to_shards(&a.input, &a.output, shards)?;
    println!("ingested {docs} documents into {shards} shards ({skipped} records skipped)");
    Ok(true)
}

fn execute(cfg: PipelineConfig, g: &Global, stop_after: Option<String>) -> Result<bool> {
    let plan = validate_config(&cfg)?;
    for w in &plan.warnings {
        log::warn!("{w}");
    }
    let out = run_pipeline(&plan, &RunOptions { resume: g.resume, stop_after })?;
    if out.completed {
        print!("{}", out.report.to_text());
        println!("\nreports written to {}", cfg.output.display());
    } else {
        println!("stopped early; completed stages are under {}", plan.work_dir().display());
    }
    Ok(out.completed)
}

/// Runs only the config's stages of one step.
pub fn step(g: &Global, step: &str, a: StepArgs) -> Result<bool> {
    if g.config.is_none() {
        bail!("{step} needs --config");
    }
    let mut cfg = load_config(g, &a.input, None)?;
    cfg.output = a.output.unwrap_or_else(|| cfg.output.join(step));
    let all = std::mem::take(&mut cfg.stages);
    let first = all.iter().position(|s| stage_group(&s.kind) == Some(step));
    let Some(first) = first else {
        bail!("the config has no {step} stages");
    };
    // scores written by earlier steps arrive in the documents' meta
    for s in &all[..first] {
        if s.kind == "quality" {
            cfg.provided_meta.push(format!("{}.score", s.name()));
        }
    }
    cfg.stages = all.into_iter().filter(|s| stage_group(&s.kind) == Some(step)).collect();
    execute(cfg, g, None)
}

pub fn run(g: &Global, a: RunArgs) -> Result<bool> {
    let cfg = load_config(g, &a.input, a.output.as_deref())?;
    execute(cfg, g, a.stop_after)
}
