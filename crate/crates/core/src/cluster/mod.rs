//! Unsupervised clustering of documents and exclusion of low-quality
//! clusters.

mod kmeans;
mod labels;
mod tfidf;

use std::path::Path;

use serde::{Deserialize, Serialize};

pub use kmeans::{fit_kmeans, Centroids};
pub use labels::{label_clusters, load_overrides, parse_overrides, ClusterLabel, ClusterLabelMap, ClusterVerdict};
pub use tfidf::TfidfModel;

use crate::error::Result;
use crate::modelfile;

pub const DEFAULT_CLUSTER_DIM: u32 = 1 << 16;

const MAGIC: &str = "curate-clusters";
const VERSION: u32 = 1;

/// max(16, n / 10000), capped at 1024.
pub fn default_k(n_docs: usize) -> usize {
    (n_docs / 10_000).clamp(16, 1024)
}

/// A fitted vectorizer with its centroids.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterModel {
    pub tfidf: TfidfModel,
    pub centroids: Centroids,
}

#[derive(Serialize, Deserialize)]
struct ClusterFile {
    tfidf: TfidfModel,
    centroids: Centroids,
    vectors: Vec<Vec<(u32, f32)>>,
}

impl ClusterModel {
    pub fn assign(&self, text: &str) -> (usize, f64) {
        self.centroids.assign(&self.tfidf.transform(text))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = ClusterFile {
            tfidf: self.tfidf.clone(),
            centroids: self.centroids.clone(),
            vectors: self.centroids.to_sparse(),
        };
        modelfile::save(path, MAGIC, VERSION, &file)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file: ClusterFile = modelfile::load(path, MAGIC, VERSION)?;
        let mut centroids = file.centroids;
        centroids.set_sparse(&file.vectors)?;
        if centroids.dim != file.tfidf.dim || centroids.k() == 0 {
            return Err(crate::error::Error::model(path, "centroid dimension does not match vectorizer"));
        }
        Ok(ClusterModel { tfidf: file.tfidf, centroids })
    }
}
