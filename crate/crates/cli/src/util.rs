use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use curate::corpus::read_documents;
use curate::pipeline::{input_files, PipelineConfig};
use curate::Document;
use serde::Serialize;

use crate::Global;

/// The config named by `--config` (or an empty one), with environment
/// path overrides, then CLI flags, applied.
pub fn load_config(g: &Global, input: &[PathBuf], output: Option<&Path>) -> Result<PipelineConfig> {
    let mut cfg = match &g.config {
        Some(p) => PipelineConfig::load(p).with_context(|| format!("loading {}", p.display()))?,
        None => PipelineConfig::from_toml("")?,
    };
    cfg.apply_env_overrides();
    if !input.is_empty() {
        cfg.input = input.to_vec();
    }
    if let Some(o) = output {
        cfg.output = o.to_path_buf();
    }
    if let Some(s) = g.shards {
        cfg.shards = s;
    }
    if let Some(w) = g.workers {
        cfg.workers = w;
    }
    if let Some(s) = g.seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    std::fs::write(path, s).with_context(|| format!("writing {}", path.display()))
}

/// Every document under the given files and directories, in path order.
pub fn read_all(paths: &[PathBuf]) -> Result<Vec<Document>> {
    if paths.is_empty() {
        bail!("no input given");
    }
    let mut docs = Vec::new();
    for f in input_files(paths)? {
        let (d, skipped) = read_documents(&f)?;
        if skipped > 0 {
            log::warn!("{}: skipped {skipped} malformed records", f.display());
        }
        docs.extend(d);
    }
    Ok(docs)
}

/// Parses `KEY=PATH`.
pub fn key_path(s: &str) -> Result<(String, PathBuf), String> {
    match s.split_once('=') {
        Some((k, v)) if !k.is_empty() && !v.is_empty() => Ok((k.to_string(), PathBuf::from(v))),
        _ => Err(format!("expected KEY=PATH, got {s:?}")),
    }
}

pub fn seed(g: &Global) -> u64 {
    g.seed.unwrap_or(0)
}

/// `--workers`, with 0 or unset meaning every available core.
pub fn worker_count(g: &Global) -> usize {
    match g.workers {
        Some(n) if n > 0 => n,
        _ => std::thread::available_parallelism().map_or(1, |n| n.get()),
    }
}
