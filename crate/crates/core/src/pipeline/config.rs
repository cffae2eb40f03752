//! Declarative pipeline configuration and its validation.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::dedup::{NearDupConfig, ParagraphDedupConfig, SubstringConfig};
use crate::error::{Error, Result};
use crate::heuristics::HeuristicConfig;
use crate::learned::CoherenceConfig;
use crate::topic::SamplingPolicy;

/// Environment variables that may replace paths from the config file.
/// Thresholds are never taken from the environment.
pub const ENV_INPUT: &str = "CURATE_INPUT";
pub const ENV_OUTPUT: &str = "CURATE_OUTPUT";
pub const ENV_WORK_DIR: &str = "CURATE_WORK_DIR";
pub const ENV_TOKENIZER: &str = "CURATE_TOKENIZER";

pub const STAGE_KINDS: [&str; 12] = [
    "heuristic",
    "langid",
    "perplexity",
    "quality",
    "safety",
    "coherence",
    "cluster",
    "paragraph_dedup",
    "minhash_dedup",
    "exact_dedup",
    "substring_dedup",
    "topic_sample",
];

/// CLI step a stage kind belongs to: filter, score, cluster, dedup or
/// sample.
pub fn stage_group(kind: &str) -> Option<&'static str> {
    Some(match kind {
        "heuristic" | "langid" => "filter",
        "perplexity" | "quality" | "safety" | "coherence" => "score",
        "cluster" => "cluster",
        "paragraph_dedup" | "minhash_dedup" | "exact_dedup" | "substring_dedup" => "dedup",
        "topic_sample" => "sample",
        _ => return None,
    })
}

fn default_shards() -> usize {
    8
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    /// JSONL files or directories of `*.jsonl` files.
    #[serde(default)]
    pub input: Vec<PathBuf>,
    #[serde(default)]
    pub output: PathBuf,
    /// Defaults to `<output>/work`.
    #[serde(default)]
    pub work_dir: Option<PathBuf>,
    #[serde(default = "default_shards")]
    pub shards: usize,
    /// 0 uses every available core.
    #[serde(default)]
    pub workers: usize,
    #[serde(default)]
    pub seed: u64,
    /// Tokenizer model for mixture token counts; word counts without it.
    #[serde(default)]
    pub tokenizer: Option<PathBuf>,
    #[serde(default)]
    pub stages: Vec<StageSpec>,
    /// Meta keys the input documents already carry, e.g. scores written by
    /// an earlier run.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub provided_meta: Vec<String>,
}

/// One `[[stages]]` entry before typing: its kind, an optional unique name
/// (defaults to the kind) and the kind-specific parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageSpec {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(flatten)]
    pub params: toml::Table,
}

impl StageSpec {
    pub fn new(kind: &str) -> Self {
        StageSpec { kind: kind.to_string(), name: None, params: toml::Table::new() }
    }

    pub fn with(mut self, key: &str, value: impl Into<toml::Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn name(&self) -> &str {
        self.name.as_deref().unwrap_or(&self.kind)
    }
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeuristicParams {
    #[serde(default)]
    pub rules: HeuristicConfig,
    #[serde(default)]
    pub url_blocklist: Option<PathBuf>,
    #[serde(default)]
    pub domain_blocklist: Option<PathBuf>,
    #[serde(default)]
    pub word_blocklist: Option<PathBuf>,
    #[serde(default = "default_true")]
    pub anonymize_pii: bool,
}

fn default_languages() -> Vec<String> {
    vec!["en".into(), "zh".into()]
}

fn half() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LangIdParams {
    pub model: PathBuf,
    #[serde(default = "default_languages")]
    pub languages: Vec<String>,
    #[serde(default = "half")]
    pub min_confidence: f64,
}

fn default_drop_buckets() -> Vec<String> {
    vec!["tail".into()]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerplexityParams {
    /// Language code to LM file; `"*"` serves languages without their own.
    pub models: BTreeMap<String, PathBuf>,
    pub buckets: PathBuf,
    #[serde(default = "default_drop_buckets")]
    pub drop: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifierParams {
    pub model: PathBuf,
    #[serde(default = "half")]
    pub min_score: f64,
}

fn default_min_words() -> usize {
    50
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoherenceParams {
    #[serde(default = "default_c_keep")]
    pub c_keep: f64,
    #[serde(default = "default_c_cut")]
    pub c_cut: f64,
    #[serde(default = "default_c_drop")]
    pub c_drop: f64,
    /// Segments shorter than this are discarded.
    #[serde(default = "default_min_words")]
    pub min_words: usize,
}

fn default_c_keep() -> f64 {
    CoherenceConfig::default().c_keep
}

fn default_c_cut() -> f64 {
    CoherenceConfig::default().c_cut
}

fn default_c_drop() -> f64 {
    CoherenceConfig::default().c_drop
}

impl CoherenceParams {
    pub fn config(&self) -> CoherenceConfig {
        CoherenceConfig { c_keep: self.c_keep, c_cut: self.c_cut, c_drop: self.c_drop, ..Default::default() }
    }
}

fn default_cluster_q_min() -> f64 {
    0.3
}

fn default_quality_key() -> String {
    "quality.score".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClusterParams {
    pub model: PathBuf,
    #[serde(default = "default_cluster_q_min")]
    pub q_min: f64,
    #[serde(default)]
    pub overrides: Option<PathBuf>,
    /// Meta key holding the per-document quality score.
    #[serde(default = "default_quality_key")]
    pub quality_key: String,
}

/// A count, or the string "unlimited".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Limit {
    Count(u32),
    Word(String),
}

fn default_limit() -> Limit {
    Limit::Count(100)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParagraphParams {
    #[serde(default = "default_limit")]
    pub max_occurrences: Limit,
    #[serde(default = "default_min_words")]
    pub min_words: usize,
}

impl ParagraphParams {
    pub fn config(&self) -> ParagraphDedupConfig {
        ParagraphDedupConfig {
            max_occurrences: match self.max_occurrences {
                Limit::Count(n) => Some(n),
                Limit::Word(_) => None,
            },
            min_words: self.min_words,
        }
    }
}

fn default_bands() -> usize {
    NearDupConfig::default().bands
}

fn default_rows() -> usize {
    NearDupConfig::default().rows
}

fn default_cutoff() -> f64 {
    0.7
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MinhashParams {
    #[serde(default = "default_bands")]
    pub bands: usize,
    #[serde(default = "default_rows")]
    pub rows: usize,
    #[serde(default = "default_true")]
    pub verify: bool,
    #[serde(default = "default_cutoff")]
    pub verify_cutoff: f64,
    /// Signatures of earlier batches; documents near them are dropped.
    #[serde(default)]
    pub snapshot: Option<PathBuf>,
    /// Where to write the snapshot extended with this run's survivors.
    #[serde(default)]
    pub snapshot_out: Option<PathBuf>,
}

impl MinhashParams {
    pub fn config(&self) -> NearDupConfig {
        NearDupConfig { bands: self.bands, rows: self.rows, verify_cutoff: self.verify.then_some(self.verify_cutoff) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExactParams {}

fn default_keep_prob() -> BTreeMap<String, f64> {
    SamplingPolicy::default().keep_prob
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopicParams {
    pub model: PathBuf,
    #[serde(default = "default_keep_prob")]
    pub keep_prob: BTreeMap<String, f64>,
    /// Defaults to the pipeline seed.
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StageParams {
    Heuristic(HeuristicParams),
    Langid(LangIdParams),
    Perplexity(PerplexityParams),
    Quality(ClassifierParams),
    Safety(ClassifierParams),
    Coherence(CoherenceParams),
    Cluster(ClusterParams),
    ParagraphDedup(ParagraphParams),
    MinhashDedup(MinhashParams),
    ExactDedup(ExactParams),
    SubstringDedup(SubstringConfig),
    TopicSample(TopicParams),
}

impl StageParams {
    pub fn kind(&self) -> &'static str {
        match self {
            StageParams::Heuristic(_) => "heuristic",
            StageParams::Langid(_) => "langid",
            StageParams::Perplexity(_) => "perplexity",
            StageParams::Quality(_) => "quality",
            StageParams::Safety(_) => "safety",
            StageParams::Coherence(_) => "coherence",
            StageParams::Cluster(_) => "cluster",
            StageParams::ParagraphDedup(_) => "paragraph_dedup",
            StageParams::MinhashDedup(_) => "minhash_dedup",
            StageParams::ExactDedup(_) => "exact_dedup",
            StageParams::SubstringDedup(_) => "substring_dedup",
            StageParams::TopicSample(_) => "topic_sample",
        }
    }

    pub fn is_dedup(&self) -> bool {
        matches!(
            self,
            StageParams::ParagraphDedup(_)
                | StageParams::MinhashDedup(_)
                | StageParams::ExactDedup(_)
                | StageParams::SubstringDedup(_)
        )
    }

    /// Input files the stage reads; all must exist at validation time.
    pub fn input_files(&self) -> Vec<&Path> {
        let mut out: Vec<&Path> = Vec::new();
        match self {
            StageParams::Heuristic(p) => out.extend(
                [&p.url_blocklist, &p.domain_blocklist, &p.word_blocklist].into_iter().flatten().map(PathBuf::as_path),
            ),
            StageParams::Langid(p) => out.push(&p.model),
            StageParams::Perplexity(p) => {
                out.extend(p.models.values().map(PathBuf::as_path));
                out.push(&p.buckets);
            }
            StageParams::Quality(p) | StageParams::Safety(p) => out.push(&p.model),
            StageParams::Cluster(p) => {
                out.push(&p.model);
                out.extend(p.overrides.as_deref());
            }
            StageParams::MinhashDedup(p) => out.extend(p.snapshot.as_deref()),
            StageParams::TopicSample(p) => out.push(&p.model),
            StageParams::Coherence(_)
            | StageParams::ParagraphDedup(_)
            | StageParams::ExactDedup(_)
            | StageParams::SubstringDedup(_) => {}
        }
        out
    }

    fn paths_mut(&mut self) -> Vec<&mut PathBuf> {
        match self {
            StageParams::Heuristic(p) => {
                [&mut p.url_blocklist, &mut p.domain_blocklist, &mut p.word_blocklist].into_iter().flatten().collect()
            }
            StageParams::Langid(p) => vec![&mut p.model],
            StageParams::Perplexity(p) => {
                let mut v: Vec<&mut PathBuf> = p.models.values_mut().collect();
                v.push(&mut p.buckets);
                v
            }
            StageParams::Quality(p) | StageParams::Safety(p) => vec![&mut p.model],
            StageParams::Cluster(p) => {
                let mut v = vec![&mut p.model];
                v.extend(p.overrides.as_mut());
                v
            }
            StageParams::MinhashDedup(p) => p.snapshot.iter_mut().chain(p.snapshot_out.iter_mut()).collect(),
            StageParams::TopicSample(p) => vec![&mut p.model],
            _ => Vec::new(),
        }
    }

    fn check(&self, errors: &mut Vec<String>) {
        let unit = |errors: &mut Vec<String>, what: &str, v: f64| {
            if !(0.0..=1.0).contains(&v) {
                errors.push(format!("{what} = {v} is outside [0, 1]"));
            }
        };
        match self {
            StageParams::Heuristic(p) => errors.extend(p.rules.validate()),
            StageParams::Langid(p) => {
                unit(errors, "min_confidence", p.min_confidence);
                if p.languages.is_empty() {
                    errors.push("languages must not be empty".into());
                }
            }
            StageParams::Perplexity(p) => {
                if p.models.is_empty() {
                    errors.push("models must name at least one language model".into());
                }
                for b in &p.drop {
                    if !["head", "middle", "tail"].contains(&b.as_str()) {
                        errors.push(format!("unknown perplexity bucket {b:?}"));
                    }
                }
            }
            StageParams::Quality(p) | StageParams::Safety(p) => unit(errors, "min_score", p.min_score),
            StageParams::Coherence(p) => errors.extend(p.config().validate()),
            StageParams::Cluster(p) => unit(errors, "q_min", p.q_min),
            StageParams::ParagraphDedup(p) => {
                if let Limit::Word(w) = &p.max_occurrences {
                    if w != "unlimited" {
                        errors.push(format!("max_occurrences must be a count or \"unlimited\", got {w:?}"));
                    }
                }
            }
            StageParams::MinhashDedup(p) => errors.extend(p.config().validate()),
            StageParams::ExactDedup(_) => {}
            StageParams::SubstringDedup(p) => {
                if p.window == 0 {
                    errors.push("window must be positive".into());
                }
            }
            StageParams::TopicSample(p) => {
                let policy = SamplingPolicy { keep_prob: p.keep_prob.clone(), seed: 0 };
                errors.extend(policy.validate());
            }
        }
    }
}

/// A typed, checked stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub name: String,
    pub params: StageParams,
}

/// A validated configuration, ready to run.
#[derive(Debug, Clone, PartialEq)]
pub struct Plan {
    pub config: PipelineConfig,
    pub stages: Vec<Stage>,
    pub warnings: Vec<String>,
}

impl Plan {
    pub fn work_dir(&self) -> PathBuf {
        self.config.work_dir.clone().unwrap_or_else(|| self.config.output.join("work"))
    }

    pub fn workers(&self) -> usize {
        if self.config.workers == 0 {
            std::thread::available_parallelism().map_or(1, |n| n.get())
        } else {
            self.config.workers
        }
    }
}

fn typed<T: DeserializeOwned>(table: &toml::Table) -> std::result::Result<T, String> {
    toml::Value::Table(table.clone()).try_into::<T>().map_err(|e| e.message().to_string())
}

fn parse_stage(spec: &StageSpec) -> std::result::Result<StageParams, String> {
    let p = &spec.params;
    Ok(match spec.kind.as_str() {
        "heuristic" => StageParams::Heuristic(typed(p)?),
        "langid" => StageParams::Langid(typed(p)?),
        "perplexity" => StageParams::Perplexity(typed(p)?),
        "quality" => StageParams::Quality(typed(p)?),
        "safety" => StageParams::Safety(typed(p)?),
        "coherence" => StageParams::Coherence(typed(p)?),
        "cluster" => StageParams::Cluster(typed(p)?),
        "paragraph_dedup" => StageParams::ParagraphDedup(typed(p)?),
        "minhash_dedup" => StageParams::MinhashDedup(typed(p)?),
        "exact_dedup" => StageParams::ExactDedup(typed(p)?),
        "substring_dedup" => StageParams::SubstringDedup(typed(p)?),
        "topic_sample" => StageParams::TopicSample(typed(p)?),
        other => return Err(format!("unknown stage kind {other:?} (known: {})", STAGE_KINDS.join(", "))),
    })
}

fn resolve(base: Option<&Path>, p: &mut PathBuf) {
    if let Some(base) = base {
        if p.is_relative() && !p.as_os_str().is_empty() {
            *p = base.join(&*p);
        }
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(vec![e.to_string()]))
    }

    /// Reads a config file; relative paths inside it are taken relative to
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml(&text)?;
        let base = path.parent().filter(|p| !p.as_os_str().is_empty());
        cfg.resolve_paths(base);
        Ok(cfg)
    }

    fn resolve_paths(&mut self, base: Option<&Path>) {
        for p in &mut self.input {
            resolve(base, p);
        }
        resolve(base, &mut self.output);
        if let Some(p) = &mut self.work_dir {
            resolve(base, p);
        }
        if let Some(p) = &mut self.tokenizer {
            resolve(base, p);
        }
        for spec in &mut self.stages {
            if let Ok(mut params) = parse_stage(spec) {
                for p in params.paths_mut() {
                    resolve(base, p);
                }
                if let Ok(toml::Value::Table(mut t)) = toml::Value::try_from(&params) {
                    t.remove("kind");
                    spec.params = t;
                }
            }
        }
    }

    /// Replaces input, output, work directory and tokenizer paths from the
    /// environment when set.
    pub fn apply_env_overrides(&mut self) {
        if let Some(v) = std::env::var_os(ENV_INPUT) {
            self.input = std::env::split_paths(&v).collect();
        }
        if let Some(v) = std::env::var_os(ENV_OUTPUT) {
            self.output = v.into();
        }
        if let Some(v) = std::env::var_os(ENV_WORK_DIR) {
            self.work_dir = Some(v.into());
        }
        if let Some(v) = std::env::var_os(ENV_TOKENIZER) {
            self.tokenizer = Some(v.into());
        }
    }

    /// Meta key of the last topic sampling stage's label.
    pub fn topic_key(&self) -> String {
        self.stages
            .iter()
            .rev()
            .find(|s| s.kind == "topic_sample")
            .map_or_else(|| "topic.label".to_string(), |s| format!("{}.label", s.name()))
    }
}

/// Checks every stage and cross-stage dependency, collecting all problems
/// before failing.
pub fn validate_config(config: &PipelineConfig) -> Result<Plan> {
    let mut errors = Vec::new();
    let mut warnings = Vec::new();
    if config.shards == 0 {
        errors.push("shards must be at least 1".into());
    }
    if config.output.as_os_str().is_empty() {
        errors.push("output path is not set".into());
    }
    for p in &config.input {
        if !p.exists() {
            errors.push(format!("input {} does not exist", p.display()));
        }
    }
    if let Some(t) = &config.tokenizer {
        if !t.is_file() {
            errors.push(format!("tokenizer model {} does not exist", t.display()));
        }
    }
    let mut names = BTreeSet::new();
    let mut stages = Vec::new();
    for (i, spec) in config.stages.iter().enumerate() {
        let name = spec.name().to_string();
        let label = format!("stage {} ({name})", i + 1);
        if name.is_empty() || name.contains(['/', '\\', '.']) {
            errors.push(format!("{label}: name must be non-empty without '/', '\\' or '.'"));
        }
        if !names.insert(name.clone()) {
            errors.push(format!("{label}: duplicate stage name {name:?}"));
        }
        match parse_stage(spec) {
            Ok(params) => {
                let mut errs = Vec::new();
                params.check(&mut errs);
                for f in params.input_files() {
                    if !f.exists() {
                        errs.push(format!("file {} does not exist", f.display()));
                    }
                }
                errors.extend(errs.into_iter().map(|e| format!("{label}: {e}")));
                stages.push(Stage { name, params });
            }
            Err(e) => errors.push(format!("{label}: {e}")),
        }
    }
    for (i, stage) in stages.iter().enumerate() {
        let before = &stages[..i];
        match &stage.params {
            StageParams::Cluster(p) => {
                let scored = before.iter().any(|s| {
                    matches!(s.params, StageParams::Quality(_)) && format!("{}.score", s.name) == p.quality_key
                });
                if !scored && !config.provided_meta.contains(&p.quality_key) {
                    errors.push(format!(
                        "stage {:?}: cluster labeling needs an earlier quality stage writing {:?}",
                        stage.name, p.quality_key
                    ));
                }
            }
            p if p.is_dedup() && !before.iter().any(|s| !s.params.is_dedup()) => {
                warnings.push(format!("dedup stage {:?} runs before any filter stage", stage.name));
            }
            _ => {}
        }
    }
    if !errors.is_empty() {
        return Err(Error::Config(errors));
    }
    Ok(Plan { config: config.clone(), stages, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn errors(text: &str) -> Vec<String> {
        match validate_config(&PipelineConfig::from_toml(text).unwrap()) {
            Err(Error::Config(e)) => e,
            other => panic!("expected config errors, got {other:?}"),
        }
    }

    #[test]
    fn minimal_config_passes() {
        let plan = validate_config(&PipelineConfig::from_toml("output = \"out\"").unwrap()).unwrap();
        assert!(plan.stages.is_empty());
        assert_eq!(plan.config.shards, 8);
        assert_eq!(plan.work_dir(), Path::new("out/work"));
    }

    #[test]
    fn unknown_stage_is_named() {
        let e = errors("output = \"o\"\n[[stages]]\nkind = \"foo\"\n");
        assert_eq!(e.len(), 1);
        assert!(e[0].contains("\"foo\""), "{e:?}");
    }

    #[test]
    fn errors_are_aggregated() {
        let text = r#"
output = "o"
shards = 0
[[stages]]
kind = "exact_dedup"
bogus = 1
[[stages]]
kind = "topic_sample"
[[stages]]
kind = "quality"
model = "/nonexistent/q.json"
min_score = 2.0
"#;
        let e = errors(text);
        assert_eq!(e.len(), 5, "{e:#?}");
        assert!(e.iter().any(|m| m.contains("bogus")));
        assert!(e.iter().any(|m| m.contains("topic_sample") && m.contains("model")));
    }

    #[test]
    fn dedup_first_warns() {
        let text = "output = \"o\"\n[[stages]]\nkind = \"exact_dedup\"\n[[stages]]\nkind = \"heuristic\"\n";
        let plan = validate_config(&PipelineConfig::from_toml(text).unwrap()).unwrap();
        assert_eq!(plan.warnings.len(), 1);
        assert_eq!(
            plan.stages[1].params,
            StageParams::Heuristic(HeuristicParams {
                rules: HeuristicConfig::default(),
                url_blocklist: None,
                domain_blocklist: None,
                word_blocklist: None,
                anonymize_pii: true,
            })
        );
    }

    #[test]
    fn duplicate_names_and_cluster_dependency() {
        let dir = tempfile::tempdir().unwrap();
        let m = dir.path().join("m.json");
        std::fs::write(&m, "{}").unwrap();
        let text = format!(
            "output = \"o\"\n[[stages]]\nkind = \"cluster\"\nmodel = {m:?}\n[[stages]]\nkind = \"heuristic\"\nname = \"x\"\n[[stages]]\nkind = \"exact_dedup\"\nname = \"x\"\n"
        );
        let e = errors(&text);
        assert_eq!(e.len(), 2, "{e:#?}");
    }

    #[test]
    fn nested_thresholds_parse() {
        let text = r#"
output = "o"
[[stages]]
kind = "heuristic"
anonymize_pii = false
[stages.rules]
min_words = 10
[stages.rules.repetition]
dup_line_frac = 0.5
[[stages]]
kind = "paragraph_dedup"
max_occurrences = "unlimited"
[[stages]]
kind = "minhash_dedup"
bands = 16
rows = 8
verify = false
"#;
        let plan = validate_config(&PipelineConfig::from_toml(text).unwrap()).unwrap();
        let StageParams::Heuristic(h) = &plan.stages[0].params else { panic!() };
        assert_eq!(h.rules.min_words, 10);
        assert_eq!(h.rules.repetition.dup_line_frac, 0.5);
        assert!(!h.anonymize_pii);
        let StageParams::ParagraphDedup(p) = &plan.stages[1].params else { panic!() };
        assert_eq!(p.config().max_occurrences, None);
        let StageParams::MinhashDedup(m) = &plan.stages[2].params else { panic!() };
        assert_eq!(m.config().verify_cutoff, None);
        assert_eq!(m.config().bands, 16);
    }

    #[test]
    fn relative_paths_follow_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pipeline.toml");
        std::fs::write(
            &path,
            "input = [\"in\"]\noutput = \"out\"\n[[stages]]\nkind = \"quality\"\nmodel = \"models/q.json\"\n",
        )
        .unwrap();
        let cfg = PipelineConfig::load(&path).unwrap();
        assert_eq!(cfg.input, vec![dir.path().join("in")]);
        assert_eq!(cfg.stages[0].params["model"].as_str().unwrap(), dir.path().join("models/q.json").to_str().unwrap());
    }
}
