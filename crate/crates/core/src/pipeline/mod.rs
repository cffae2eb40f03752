//! Declarative cascade: config, shard-parallel stage execution with
//! resumable checkpoints, removal accounting and mixture reports.

mod config;
mod report;
mod run;
mod stages;

pub use config::{
    stage_group, validate_config, ClassifierParams, ClusterParams, CoherenceParams, ExactParams, HeuristicParams,
    LangIdParams, Limit, MinhashParams, ParagraphParams, PerplexityParams, PipelineConfig, Plan, Stage, StageParams,
    StageSpec, TopicParams, ENV_INPUT, ENV_OUTPUT, ENV_TOKENIZER, ENV_WORK_DIR, STAGE_KINDS,
};
pub use report::{count_docs, report_mixture, Counts, MixtureReport, Share, TokenCounter};
pub use run::{
    ingest_to_shards, input_files, run_pipeline, shard_file, shard_of, RunOptions, RunOutcome, StageThroughput,
};
pub use stages::{load_stage, Loaded, Outcome};
