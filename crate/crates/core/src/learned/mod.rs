//! Learned scorers on a shared hashed-feature substrate: quality and safety
//! classifiers and the paragraph coherence scorer.

mod classifier;
mod coherence;
mod features;

pub use classifier::{train_classifier, LinearClassifier, TrainConfig, TrainMeta};
pub use coherence::{apply_coherence, coherence_report, CoherenceAction, CoherenceConfig, CoherenceReport};
pub use features::{clipped_cosine, featurize, featurize_counts, sparse_dot, HashedFeatureVector, DEFAULT_DIM};
