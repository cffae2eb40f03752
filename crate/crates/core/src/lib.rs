//! Pretraining corpus curation: cascaded heuristic and learned filtering,
//! cluster-level exclusion, three-stage deduplication, topic-aware
//! down-sampling, BPE tokenization with digit splitting and byte fallback,
//! and long-context data construction.

pub mod bench;
pub mod cluster;
pub mod corpus;
pub mod dedup;
pub mod error;
pub mod hashing;
pub mod heuristics;
pub mod lang;
pub mod learned;
pub mod mixer;
pub mod modelfile;
pub mod pipeline;
mod serde_util;
pub mod synth;
pub mod tokenizer;
pub mod topic;

pub use corpus::{dedup_normalize, Document, ShardManifest, StageReport};
pub use error::{Error, Result};
