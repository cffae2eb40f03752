//! Statistical language models: language identification, word n-gram
//! perplexity and perplexity bucketing.

mod buckets;
mod langid;
mod ngram_lm;

pub use buckets::{fit_buckets, Bucket, PerplexityBuckets, GLOBAL_KEY};
pub use langid::{identify_language, CharNgramProfile, LangIdConfig, MIN_TEXT_CHARS, MIN_TRAIN_CHARS};
pub use ngram_lm::{
    lm_perplexity, modified_kn_discounts, sentences, LmConfig, NgramLm, BOS, EOS, FALLBACK_DISCOUNTS, UNK,
};
