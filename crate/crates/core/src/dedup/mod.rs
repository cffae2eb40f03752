//! Cascaded deduplication: paragraph counting, MinHash-LSH near-duplicate
//! removal, exact document matching and exact substring excision.

mod clusters;
mod exact;
mod lsh;
mod minhash;
mod near;
mod paragraph;
mod snapshot;
mod substring;

pub use clusters::{resolve_clusters, DupCluster, UnionFind};
pub use exact::{exact_duplicates, exact_key};
pub use lsh::LshIndex;
pub use minhash::{
    jaccard, matching_positions, minhash_signature, perm_seeds, shingles, shingles_n, signature_of, Signature,
    NUM_PERM, SHINGLE_WORDS,
};
pub use near::{near_duplicates, NearDupConfig, NearDupResult};
pub use paragraph::{paragraph_key, ParagraphCounter, ParagraphDedupConfig, ParagraphOutcome};
pub use snapshot::DedupSnapshot;
pub use substring::{excise, substring_dedup, substring_marks, SubstringConfig, SubstringOutcome, DEFAULT_WINDOW};
