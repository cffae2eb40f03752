//! Stage-serial, shard-parallel execution with per-stage checkpoints.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::Plan;
use super::report::{count_docs, MixtureReport, TokenCounter};
use super::stages::{load_stage, Outcome};
use crate::corpus::{is_wet_path, read_documents, read_jsonl_shard, write_jsonl_shard, Document, StageReport};
use crate::error::{Error, Result};
use crate::hashing::hash64;
use crate::heuristics::segment::word_count;
use crate::tokenizer::Tokenizer;

const DONE: &str = "DONE";
const FP_SEED: u64 = 0x6375_7261_7465;

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Reuse completed stages whose fingerprints match.
    pub resume: bool,
    /// Stop after the stage with this name.
    pub stop_after: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StageThroughput {
    pub stage_name: String,
    pub seconds: f64,
    pub docs_in: u64,
    pub bytes_in: u64,
    pub docs_per_sec: f64,
    pub mb_per_sec: f64,
    pub mb_per_sec_per_worker: f64,
    pub resumed: bool,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: MixtureReport,
    pub throughput: Vec<StageThroughput>,
    /// False when the run stopped early on request.
    pub completed: bool,
    pub output_shards: Vec<PathBuf>,
}

pub fn shard_of(id: &str, shards: usize) -> usize {
    (hash64(id.as_bytes(), 0) % shards as u64) as usize
}

pub fn shard_file(dir: &Path, shard: usize) -> PathBuf {
    dir.join(format!("shard-{shard:05}.jsonl"))
}

/// Every `*.jsonl` and WET file under the inputs, in path order.
pub fn input_files(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(p)
                .map_err(|e| Error::io(p, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == "jsonl") || is_wet_path(f))
                .collect();
            found.sort();
            files.extend(found);
        } else {
            files.push(p.clone());
        }
    }
    Ok(files)
}

fn digest_file(path: &Path) -> Result<u64> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(hash64(&bytes, FP_SEED))
}

fn chain(prev: u64, parts: &[&[u8]]) -> u64 {
    let mut buf = prev.to_le_bytes().to_vec();
    for p in parts {
        buf.extend_from_slice(&(p.len() as u64).to_le_bytes());
        buf.extend_from_slice(p);
    }
    hash64(&buf, FP_SEED)
}

fn is_done(dir: &Path, fingerprint: u64) -> bool {
    fs::read_to_string(dir.join(DONE)).is_ok_and(|s| s.trim() == format!("{fingerprint:016x}"))
}

fn fresh_dir(dir: &Path) -> Result<()> {
    if dir.exists() {
        fs::remove_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Invalid(e.to_string()))?;
    s.push('\n');
    fs::write(path, s).map_err(|e| Error::io(path, e))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let s = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&s).map_err(|e| Error::model(path, e.to_string()))
}

fn write_shards(dir: &Path, shards: &[Vec<Document>]) -> Result<()> {
    shards.par_iter().enumerate().try_for_each(|(i, docs)| write_jsonl_shard(docs, &shard_file(dir, i)).map(|_| ()))
}

fn read_shards(dir: &Path, n: usize) -> Result<Vec<Vec<Document>>> {
    (0..n).into_par_iter().map(|i| read_jsonl_shard(&shard_file(dir, i)).map(|(d, _)| d)).collect()
}

#[derive(Debug, Serialize, Deserialize)]
struct InputSummary {
    docs: u64,
    skipped_lines: u64,
}

/// Reads every input file, assigns documents to shards by id hash and
/// sorts each shard by id.
fn ingest(files: &[PathBuf], shards: usize) -> Result<(Vec<Vec<Document>>, InputSummary)> {
    let parts: Vec<(Vec<Document>, u64)> = files.par_iter().map(|f| read_documents(f)).collect::<Result<_>>()?;
    let mut out: Vec<Vec<Document>> = vec![Vec::new(); shards];
    let mut summary = InputSummary { docs: 0, skipped_lines: 0 };
    for (docs, skipped) in parts {
        summary.skipped_lines += skipped;
        summary.docs += docs.len() as u64;
        for d in docs {
            out[shard_of(&d.id, shards)].push(d);
        }
    }
    out.par_iter_mut().try_for_each(|s| {
        s.sort_by(|a, b| a.id.cmp(&b.id));
        match s.windows(2).find(|w| w[0].id == w[1].id) {
            Some(w) => Err(Error::DuplicateDocId(w[0].id.clone())),
            None => Ok(()),
        }
    })?;
    Ok((out, summary))
}

/// Reads WET or JSONL inputs and writes them as `shards` id-sorted JSONL
/// shards under `out`. Returns (documents, skipped records).
pub fn ingest_to_shards(inputs: &[PathBuf], out: &Path, shards: usize) -> Result<(u64, u64)> {
    if shards == 0 {
        return Err(Error::Invalid("shards must be at least 1".into()));
    }
    let files = input_files(inputs)?;
    let (docs, summary) = ingest(&files, shards)?;
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    write_shards(out, &docs)?;
    Ok((summary.docs, summary.skipped_lines))
}

fn account(name: &str, input: &[Document], outcomes: Vec<Outcome>) -> Result<(Vec<Document>, StageReport)> {
    let mut r = StageReport::new(name);
    let mut docs = Vec::with_capacity(outcomes.len());
    for (d, o) in input.iter().zip(outcomes) {
        r.docs_in += 1;
        r.tokens_in += word_count(&d.text) as u64;
        match o {
            Outcome::Keep(d) => {
                r.docs_kept += 1;
                docs.push(d);
            }
            Outcome::Drop(rule) => r.drop_doc(&rule),
            Outcome::Split(parts) => {
                if parts.is_empty() {
                    return Err(Error::Invalid(format!("stage {name} split {:?} into nothing", d.id)));
                }
                r.docs_kept += 1;
                r.docs_born += parts.len() as u64 - 1;
                docs.extend(parts);
            }
        }
    }
    docs.sort_by(|a, b| a.id.cmp(&b.id));
    if let Some(w) = docs.windows(2).find(|w| w[0].id == w[1].id) {
        return Err(Error::DuplicateDocId(w[0].id.clone()));
    }
    r.docs_out = docs.len() as u64;
    r.tokens_kept = docs.iter().map(|d| word_count(&d.text) as u64).sum();
    Ok((docs, r))
}

fn stage_err(stage: &str, shard: Option<usize>) -> impl Fn(Error) -> Error + '_ {
    move |e| Error::Stage { stage: stage.to_string(), shard, source: Box::new(e) }
}

/// Runs the validated plan. Each stage reads the previous stage's shards
/// and writes its own under `<work>/stages/<k>_<name>/`, finishing with a
/// DONE marker holding a fingerprint of the inputs, models and parameters
/// up to that stage. With `resume`, stages whose marker matches are not
/// recomputed. Output bytes do not depend on the worker count.
pub fn run_pipeline(plan: &Plan, opts: &RunOptions) -> Result<RunOutcome> {
    let workers = plan.workers();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Invalid(format!("cannot build worker pool: {e}")))?;
    pool.install(|| run_in_pool(plan, opts, workers))
}

fn run_in_pool(plan: &Plan, opts: &RunOptions, workers: usize) -> Result<RunOutcome> {
    let cfg = &plan.config;
    let n = cfg.shards;
    let stages_dir = plan.work_dir().join("stages");
    if !opts.resume && stages_dir.exists() {
        fs::remove_dir_all(&stages_dir).map_err(|e| Error::io(&stages_dir, e))?;
    }
    let mut throughput = Vec::new();

    // stage 0: ingest
    let files = input_files(&cfg.input)?;
    let mut fp = chain(0, &[&(n as u64).to_le_bytes(), &cfg.seed.to_le_bytes()]);
    for f in &files {
        fp = chain(fp, &[f.to_string_lossy().as_bytes(), &digest_file(f)?.to_le_bytes()]);
    }
    let mut dir = stages_dir.join("000_input");
    let mut current: Option<Vec<Vec<Document>>> = None;
    let summary: InputSummary = if opts.resume && is_done(&dir, fp) {
        info!("input: reusing {}", dir.display());
        read_json(&dir.join("input.json"))?
    } else {
        let t = Instant::now();
        fresh_dir(&dir)?;
        let (shards, summary) = ingest(&files, n).map_err(stage_err("input", None))?;
        write_shards(&dir, &shards)?;
        write_json(&dir.join("input.json"), &summary)?;
        fs::write(dir.join(DONE), format!("{fp:016x}\n")).map_err(|e| Error::io(&dir, e))?;
        info!("input: {} documents in {} shards ({:.2}s)", summary.docs, n, t.elapsed().as_secs_f64());
        current = Some(shards);
        summary
    };

    let mut reports: Vec<StageReport> = Vec::new();
    let mut completed = true;
    for (k, stage) in plan.stages.iter().enumerate() {
        let spec = serde_json::to_vec(stage).map_err(|e| Error::Invalid(e.to_string()))?;
        fp = chain(fp, &[&spec]);
        for f in stage.params.input_files() {
            fp = chain(fp, &[&digest_file(f)?.to_le_bytes()]);
        }
        let stage_dir = stages_dir.join(format!("{:03}_{}", k + 1, stage.name));
        if opts.resume && is_done(&stage_dir, fp) {
            info!("{}: reusing {}", stage.name, stage_dir.display());
            let r: StageReport = read_json(&stage_dir.join("report.json"))?;
            throughput.push(StageThroughput {
                stage_name: stage.name.clone(),
                docs_in: r.docs_in,
                resumed: true,
                ..Default::default()
            });
            reports.push(r);
            current = None;
            dir = stage_dir;
        } else {
            let input = match current.take() {
                Some(c) => c,
                None => read_shards(&dir, n)?,
            };
            let t = Instant::now();
            let bytes_in: u64 = input.iter().flatten().map(|d| d.text.len() as u64).sum();
            fresh_dir(&stage_dir)?;
            let loaded = load_stage(stage, cfg.seed).map_err(stage_err(&stage.name, None))?;
            let name = stage.name.as_str();
            let (outcomes, artifacts): (Vec<Vec<Outcome>>, _) = if loaded.per_document() {
                let o = input
                    .par_iter()
                    .enumerate()
                    .map(|(i, shard)| {
                        shard
                            .par_iter()
                            .map(|d| loaded.apply_doc(name, d.clone()))
                            .collect::<Result<Vec<_>>>()
                            .map_err(stage_err(name, Some(i)))
                    })
                    .collect::<Result<Vec<_>>>()?;
                (o, Vec::new())
            } else {
                loaded.apply_corpus(name, input.clone()).map_err(stage_err(name, None))?
            };
            let mut report = StageReport::new(name);
            let mut next = Vec::with_capacity(n);
            let per_shard: Vec<(Vec<Document>, StageReport)> = input
                .par_iter()
                .zip(outcomes)
                .enumerate()
                .map(|(i, (shard, o))| account(name, shard, o).map_err(stage_err(name, Some(i))))
                .collect::<Result<_>>()?;
            for (docs, r) in per_shard {
                report.merge(&r);
                next.push(docs);
            }
            report.check().map_err(Error::Accounting)?;
            write_shards(&stage_dir, &next)?;
            write_json(&stage_dir.join("report.json"), &report)?;
            for (file, content) in artifacts {
                let p = stage_dir.join(file);
                fs::write(&p, content).map_err(|e| Error::io(&p, e))?;
            }
            fs::write(stage_dir.join(DONE), format!("{fp:016x}\n")).map_err(|e| Error::io(&stage_dir, e))?;
            let secs = t.elapsed().as_secs_f64().max(1e-9);
            let mb = bytes_in as f64 / 1e6;
            info!(
                "{name}: in {} kept {} dropped {} born {} ({secs:.2}s, {:.1} MB/s)",
                report.docs_in,
                report.docs_kept,
                report.docs_dropped,
                report.docs_born,
                mb / secs
            );
            throughput.push(StageThroughput {
                stage_name: name.to_string(),
                seconds: secs,
                docs_in: report.docs_in,
                bytes_in,
                docs_per_sec: report.docs_in as f64 / secs,
                mb_per_sec: mb / secs,
                mb_per_sec_per_worker: mb / secs / workers as f64,
                resumed: false,
            });
            reports.push(report);
            current = Some(next);
            dir = stage_dir;
        }
        if opts.stop_after.as_deref() == Some(stage.name.as_str()) && k + 1 < plan.stages.len() {
            completed = false;
            break;
        }
    }

    let finals = match current {
        Some(c) => c,
        None => read_shards(&dir, n)?,
    };
    let tokenizer = cfg.tokenizer.as_deref().map(Tokenizer::load).transpose()?;
    let counter = match &tokenizer {
        Some(t) => TokenCounter::Tokenizer(t),
        None => TokenCounter::Words,
    };
    let topic_key = cfg.topic_key();
    let mut counts = super::report::Counts::default();
    for shard in &finals {
        counts.merge(&count_docs(shard, counter, &topic_key));
    }
    let mut report = MixtureReport::from_counts(&counts, counter.unit());
    report.skipped_input_lines = summary.skipped_lines;
    report.set_stages(summary.docs, reports);
    report.check()?;

    let out = &cfg.output;
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let mut output_shards = Vec::new();
    if completed {
        for entry in fs::read_dir(out).map_err(|e| Error::io(out, e))?.flatten() {
            let name = entry.file_name().to_string_lossy().into_owned();
            if name.starts_with("shard-") {
                fs::remove_file(entry.path()).map_err(|e| Error::io(entry.path(), e))?;
            }
        }
        for i in 0..n {
            for suffix in ["", ".manifest.json"] {
                let src = PathBuf::from(format!("{}{suffix}", shard_file(&dir, i).display()));
                let dst = PathBuf::from(format!("{}{suffix}", shard_file(out, i).display()));
                if src.exists() {
                    fs::copy(&src, &dst).map_err(|e| Error::io(&dst, e))?;
                }
            }
            output_shards.push(shard_file(out, i));
        }
        write_json(&out.join("report.json"), &report)?;
        fs::write(out.join("report.txt"), report.to_text()).map_err(|e| Error::io(out, e))?;
        write_json(&out.join("throughput.json"), &throughput)?;
    } else {
        warn!("stopped after stage {:?}; output not written", opts.stop_after);
    }
    Ok(RunOutcome { report, throughput, completed, output_shards })
}
