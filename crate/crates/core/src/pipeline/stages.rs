//! Stage execution: per-document stages run shard-parallel, corpus-wide
//! stages see every shard at once.

use std::collections::BTreeMap;

use rayon::prelude::*;

use super::config::{Stage, StageParams};
use crate::cluster::{label_clusters, load_overrides, ClusterLabelMap, ClusterModel, ClusterVerdict};
use crate::corpus::Document;
use crate::dedup::{
    exact_duplicates, near_duplicates, signature_of, substring_dedup, DedupSnapshot, NearDupConfig, ParagraphCounter,
    ParagraphDedupConfig, ParagraphOutcome, SubstringConfig, SubstringOutcome,
};
use crate::error::{Error, Result};
use crate::heuristics::segment::word_count;
use crate::heuristics::{Blocklists, HeuristicFilter};
use crate::lang::{CharNgramProfile, NgramLm, PerplexityBuckets};
use crate::learned::{apply_coherence, coherence_report, CoherenceAction, CoherenceConfig, LinearClassifier};
use crate::topic::{SamplingPolicy, TopicModel};

/// What a stage did with one input document.
#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Keep(Document),
    Drop(String),
    /// One input became several outputs (never empty).
    Split(Vec<Document>),
}

/// A stage with its models loaded.
pub enum Loaded {
    Heuristic(HeuristicFilter),
    LangId { profile: CharNgramProfile, languages: Vec<String>, min_confidence: f64 },
    Perplexity { models: BTreeMap<String, NgramLm>, buckets: PerplexityBuckets, drop: Vec<String> },
    Classifier { model: LinearClassifier, min_score: f64, rule: &'static str },
    Coherence { config: CoherenceConfig, min_words: usize },
    Cluster { model: ClusterModel, q_min: f64, overrides: BTreeMap<usize, ClusterVerdict>, quality_key: String },
    ParagraphDedup(ParagraphDedupConfig),
    MinhashDedup { config: NearDupConfig, snapshot: Option<DedupSnapshot>, snapshot_out: Option<std::path::PathBuf> },
    ExactDedup,
    SubstringDedup(SubstringConfig),
    TopicSample { model: TopicModel, policy: SamplingPolicy },
}

/// Files a stage leaves next to its output shards.
pub type Artifacts = Vec<(String, String)>;

pub fn load_stage(stage: &Stage, seed: u64) -> Result<Loaded> {
    Ok(match &stage.params {
        StageParams::Heuristic(p) => {
            let lists = Blocklists::load(
                p.url_blocklist.as_deref(),
                p.domain_blocklist.as_deref(),
                p.word_blocklist.as_deref(),
            )?;
            let mut f = HeuristicFilter::new(p.rules.clone(), lists);
            f.anonymize = p.anonymize_pii;
            Loaded::Heuristic(f)
        }
        StageParams::Langid(p) => Loaded::LangId {
            profile: CharNgramProfile::load(&p.model)?,
            languages: p.languages.clone(),
            min_confidence: p.min_confidence,
        },
        StageParams::Perplexity(p) => Loaded::Perplexity {
            models: p
                .models
                .iter()
                .map(|(lang, path)| Ok((lang.clone(), NgramLm::load(path)?)))
                .collect::<Result<_>>()?,
            buckets: PerplexityBuckets::load(&p.buckets)?,
            drop: p.drop.clone(),
        },
        StageParams::Quality(p) => {
            Loaded::Classifier { model: LinearClassifier::load(&p.model)?, min_score: p.min_score, rule: "quality-low" }
        }
        StageParams::Safety(p) => {
            Loaded::Classifier { model: LinearClassifier::load(&p.model)?, min_score: p.min_score, rule: "unsafe" }
        }
        StageParams::Coherence(p) => Loaded::Coherence { config: p.config(), min_words: p.min_words },
        StageParams::Cluster(p) => Loaded::Cluster {
            model: ClusterModel::load(&p.model)?,
            q_min: p.q_min,
            overrides: match &p.overrides {
                Some(path) => load_overrides(path)?,
                None => BTreeMap::new(),
            },
            quality_key: p.quality_key.clone(),
        },
        StageParams::ParagraphDedup(p) => Loaded::ParagraphDedup(p.config()),
        StageParams::MinhashDedup(p) => Loaded::MinhashDedup {
            config: p.config(),
            snapshot: p.snapshot.as_deref().map(DedupSnapshot::load).transpose()?,
            snapshot_out: p.snapshot_out.clone(),
        },
        StageParams::ExactDedup(_) => Loaded::ExactDedup,
        StageParams::SubstringDedup(p) => Loaded::SubstringDedup(p.clone()),
        StageParams::TopicSample(p) => Loaded::TopicSample {
            model: TopicModel::load(&p.model)?,
            policy: SamplingPolicy { keep_prob: p.keep_prob.clone(), seed: p.seed.unwrap_or(seed) },
        },
    })
}

fn drop(rule: impl Into<String>) -> Outcome {
    Outcome::Drop(rule.into())
}

impl Loaded {
    /// Per-document stages can run on each shard independently.
    pub fn per_document(&self) -> bool {
        !matches!(
            self,
            Loaded::Cluster { .. }
                | Loaded::ParagraphDedup(_)
                | Loaded::MinhashDedup { .. }
                | Loaded::ExactDedup
                | Loaded::SubstringDedup(_)
        )
    }

    pub fn apply_doc(&self, name: &str, mut doc: Document) -> Result<Outcome> {
        Ok(match self {
            Loaded::Heuristic(f) => {
                let out = f.evaluate(&doc);
                if !out.verdict.keep {
                    return Ok(drop(out.verdict.rule_id));
                }
                if let Some(text) = out.text {
                    doc.text = text;
                    doc.set_meta(name, "pii_replacements", out.pii_replacements as u64);
                }
                Outcome::Keep(doc)
            }
            Loaded::LangId { profile, languages, min_confidence } => {
                let (lang, conf) = profile.identify(&doc.text);
                doc.set_meta(name, "lang", lang.as_str());
                doc.set_meta(name, "confidence", conf);
                if lang == "und" {
                    return Ok(drop("lang-undetermined"));
                }
                if !languages.contains(&lang) {
                    return Ok(drop("lang-excluded"));
                }
                if conf < *min_confidence {
                    return Ok(drop("lang-low-confidence"));
                }
                doc.lang = Some(lang);
                Outcome::Keep(doc)
            }
            Loaded::Perplexity { models, buckets, drop: drop_buckets } => {
                let lang = doc.lang.clone().unwrap_or_default();
                let Some(lm) = models.get(&lang).or_else(|| models.get("*")) else {
                    doc.set_meta(name, "bucket", "unscored");
                    return Ok(Outcome::Keep(doc));
                };
                let ppl = lm.perplexity(&doc.text);
                doc.set_meta(name, "score", ppl);
                let bucket = match buckets.bucket(ppl, &lang) {
                    Ok(b) => b.as_str(),
                    Err(Error::UnknownLanguage(_)) => "unscored",
                    Err(e) => return Err(e),
                };
                if drop_buckets.iter().any(|b| b == bucket) {
                    return Ok(drop(format!("ppl-{bucket}")));
                }
                doc.set_meta(name, "bucket", bucket);
                Outcome::Keep(doc)
            }
            Loaded::Classifier { model, min_score, rule } => {
                let s = model.score(&doc.text);
                if s < *min_score {
                    return Ok(drop(*rule));
                }
                doc.set_meta(name, "score", s);
                Outcome::Keep(doc)
            }
            Loaded::Coherence { config, min_words } => {
                let report = coherence_report(&doc, config);
                match &report.action {
                    CoherenceAction::Drop => drop("incoherent"),
                    CoherenceAction::Keep => {
                        doc.set_meta(name, "mean", report.mean);
                        Outcome::Keep(doc)
                    }
                    CoherenceAction::SegmentAt(_) => {
                        let parent = doc.id.clone();
                        let segments: Vec<Document> = apply_coherence(&doc, &report)?
                            .into_iter()
                            .filter(|s| word_count(&s.text) >= *min_words)
                            .map(|mut s| {
                                s.set_meta(name, "mean", report.mean);
                                s.set_meta(name, "parent", parent.as_str());
                                s
                            })
                            .collect();
                        if segments.is_empty() {
                            drop("incoherent-segments-short")
                        } else {
                            Outcome::Split(segments)
                        }
                    }
                }
            }
            Loaded::TopicSample { model, policy } => {
                let (label, _) = model.classify(&doc.text);
                if !policy.keep(&doc.id, &label) {
                    return Ok(drop(format!("downsample-{label}")));
                }
                doc.set_meta(name, "label", label);
                Outcome::Keep(doc)
            }
            _ => unreachable!("corpus-wide stage applied per document"),
        })
    }

    /// Runs a corpus-wide stage over all shards at once.
    pub fn apply_corpus(&self, name: &str, shards: Vec<Vec<Document>>) -> Result<(Vec<Vec<Outcome>>, Artifacts)> {
        let mut artifacts = Artifacts::new();
        let all: Vec<&Document> = shards.iter().flatten().collect();
        let flat: Vec<(&str, &str)> = all.iter().map(|d| (d.id.as_str(), d.text.as_str())).collect();
        // per flat document: None keeps unchanged, Some(outcome) otherwise
        let decisions: Vec<Option<Outcome>> = match self {
            Loaded::Cluster { model, q_min, overrides, quality_key } => {
                let assigned: Vec<(usize, f64)> = flat.par_iter().map(|d| model.assign(d.1)).collect();
                let k = model.centroids.k();
                let rows: Vec<(&str, usize, Option<f64>)> = shards
                    .iter()
                    .flatten()
                    .zip(&assigned)
                    .map(|(d, a)| (d.id.as_str(), a.0, d.meta_f64(quality_key)))
                    .collect();
                let labels: ClusterLabelMap = label_clusters(k, &rows, *q_min, overrides)?;
                artifacts.push((
                    "cluster_labels.json".into(),
                    serde_json::to_string_pretty(&labels).map_err(|e| Error::Invalid(e.to_string()))?,
                ));
                assigned
                    .iter()
                    .map(|&(c, _)| {
                        let l = &labels.clusters[c];
                        match (l.verdict(), l.manual) {
                            (ClusterVerdict::Keep, _) => None,
                            (ClusterVerdict::Drop, Some(_)) => Some(drop("cluster-manual-drop")),
                            (ClusterVerdict::Drop, None) => Some(drop("cluster-low-quality")),
                        }
                    })
                    .collect()
            }
            Loaded::ParagraphDedup(cfg) => {
                let counter = shards
                    .par_iter()
                    .map(|shard| {
                        let mut c = ParagraphCounter::default();
                        shard.iter().for_each(|d| c.add(&d.text));
                        c
                    })
                    .reduce(ParagraphCounter::default, |mut a, b| {
                        a.merge(b);
                        a
                    });
                all.par_iter()
                    .map(|d| match counter.filter(&d.text, cfg) {
                        ParagraphOutcome::Unchanged => None,
                        ParagraphOutcome::Dropped { .. } => Some(drop("paragraph-dedup-short")),
                        ParagraphOutcome::Rewritten { text, removed } => {
                            Some(rewritten(d, text, name, "removed_paragraphs", removed as u64))
                        }
                    })
                    .collect()
            }
            Loaded::MinhashDedup { config, snapshot, snapshot_out } => {
                let res = near_duplicates(&flat, config, snapshot.as_ref())?;
                let summary = serde_json::json!({
                    "candidate_pairs": res.candidate_pairs,
                    "verified_pairs": res.verified_pairs,
                    "bypassed": res.bypassed,
                    "clusters": res.clusters.len(),
                });
                artifacts.push(("minhash.json".into(), summary.to_string()));
                if let Some(out) = snapshot_out {
                    let mut snap = snapshot.clone().unwrap_or_default();
                    let mut kept: Vec<(&str, &str)> =
                        flat.iter().zip(&res.keep).filter(|(_, &k)| k).map(|(d, _)| *d).collect();
                    kept.sort_unstable();
                    let sigs: Vec<(String, Box<_>)> = kept
                        .par_iter()
                        .filter_map(|(id, text)| signature_of(text).map(|s| (id.to_string(), s)))
                        .collect();
                    snap.extend(sigs)?;
                    snap.save(out)?;
                }
                res.keep.iter().map(|&k| (!k).then(|| drop("minhash-dup"))).collect()
            }
            Loaded::ExactDedup => {
                exact_duplicates(&flat).into_iter().map(|keep| (!keep).then(|| drop("exact-dup"))).collect()
            }
            Loaded::SubstringDedup(cfg) => substring_dedup(&flat, cfg)
                .into_par_iter()
                .zip(all.par_iter())
                .map(|(o, d)| match o {
                    SubstringOutcome::Unchanged => None,
                    SubstringOutcome::Dropped { .. } => Some(drop("substring-dedup-short")),
                    SubstringOutcome::Rewritten { text, excised_bytes } => {
                        Some(rewritten(d, text, name, "excised_bytes", excised_bytes as u64))
                    }
                })
                .collect(),
            _ => unreachable!("per-document stage applied corpus-wide"),
        };
        let mut decisions = decisions.into_iter();
        let out = shards
            .into_iter()
            .map(|shard| {
                shard
                    .into_iter()
                    .map(|d| match decisions.next().expect("one decision per document") {
                        None => Outcome::Keep(d),
                        Some(o) => o,
                    })
                    .collect()
            })
            .collect();
        Ok((out, artifacts))
    }
}

/// A kept document with new text.
fn rewritten(doc: &Document, text: String, stage: &str, key: &str, value: u64) -> Outcome {
    let mut d = Document { text, ..doc.clone() };
    d.set_meta(stage, key, value);
    Outcome::Keep(d)
}
