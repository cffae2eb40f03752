//! Spherical k-means with k-means++ seeding.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learned::HashedFeatureVector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Centroids {
    pub dim: u32,
    pub seed: u64,
    pub iterations: usize,
    pub inertia: f64,
    /// Inertia after each assignment step.
    pub inertia_history: Vec<f64>,
    /// Dense, L2-normalized centroid vectors.
    #[serde(skip)]
    pub vectors: Vec<Vec<f32>>,
}

impl Centroids {
    pub fn k(&self) -> usize {
        self.vectors.len()
    }

    pub fn similarity(&self, c: usize, x: &HashedFeatureVector) -> f64 {
        let cv = &self.vectors[c];
        x.entries.iter().map(|&(i, v)| cv[i as usize] as f64 * v as f64).sum()
    }

    /// Most similar centroid and its cosine; ties go to the lowest id and
    /// the zero vector goes to cluster 0.
    pub fn assign(&self, x: &HashedFeatureVector) -> (usize, f64) {
        let mut best = (0, f64::NEG_INFINITY);
        for c in 0..self.k() {
            let s = self.similarity(c, x);
            if s > best.1 {
                best = (c, s);
            }
        }
        if x.is_empty() {
            return (0, 0.0);
        }
        best
    }

    /// Centroids as sorted sparse lists, for model files.
    pub fn to_sparse(&self) -> Vec<Vec<(u32, f32)>> {
        self.vectors
            .iter()
            .map(|v| v.iter().enumerate().filter(|(_, x)| **x != 0.0).map(|(i, &x)| (i as u32, x)).collect())
            .collect()
    }

    pub fn set_sparse(&mut self, sparse: &[Vec<(u32, f32)>]) -> Result<()> {
        let mut vectors = Vec::with_capacity(sparse.len());
        for s in sparse {
            let mut v = vec![0.0f32; self.dim as usize];
            for &(i, x) in s {
                *v.get_mut(i as usize).ok_or_else(|| Error::Invalid(format!("centroid index {i} out of range")))? = x;
            }
            vectors.push(v);
        }
        self.vectors = vectors;
        Ok(())
    }
}

fn vector_key(v: &HashedFeatureVector) -> Vec<(u32, u32)> {
    v.entries.iter().map(|&(i, x)| (i, x.to_bits())).collect()
}

fn densify(x: &HashedFeatureVector, dim: u32) -> Vec<f32> {
    let mut v = vec![0.0f32; dim as usize];
    for &(i, x) in &x.entries {
        v[i as usize] = x;
    }
    v
}

fn normalize(v: &mut [f64]) -> bool {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n == 0.0 {
        return false;
    }
    v.iter_mut().for_each(|x| *x /= n);
    true
}

/// k-means++ seeding with distance 1 - cos.
fn seed_centers(points: &[HashedFeatureVector], k: usize, dim: u32, rng: &mut ChaCha8Rng) -> Vec<Vec<f32>> {
    let n = points.len();
    let first = rng.gen_range(0..n);
    let mut centers = vec![densify(&points[first], dim)];
    let mut chosen = vec![first];
    let mut dist: Vec<f64> = points.par_iter().map(|p| cos_dist(&centers[0], p)).collect();
    while centers.len() < k {
        let total: f64 = dist.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.gen::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = n - 1;
            for (i, &d) in dist.iter().enumerate() {
                acc += d;
                if acc > target && d > 0.0 {
                    pick = i;
                    break;
                }
            }
            pick
        } else {
            (0..n).find(|i| !chosen.contains(i)).unwrap_or(0)
        };
        chosen.push(pick);
        let c = densify(&points[pick], dim);
        dist.par_iter_mut().zip(points.par_iter()).for_each(|(d, p)| *d = d.min(cos_dist(&c, p)));
        centers.push(c);
    }
    centers
}

fn cos_dist(center: &[f32], p: &HashedFeatureVector) -> f64 {
    let s: f64 = p.entries.iter().map(|&(i, v)| center[i as usize] as f64 * v as f64).sum();
    (1.0 - s).max(0.0)
}

/// Fits `k` centroids to L2-normalized vectors. Stops after `max_iters`
/// assignment steps or when assignments stop changing. Empty clusters keep
/// their previous centroid.
pub fn fit_kmeans(points: &[HashedFeatureVector], k: usize, max_iters: usize, seed: u64) -> Result<Centroids> {
    if k == 0 {
        return Err(Error::Invalid("k must be at least 1".into()));
    }
    let distinct = points.iter().filter(|p| !p.is_empty()).map(vector_key).collect::<FxHashSet<_>>().len();
    if distinct < k {
        return Err(Error::TooFewPoints { needed: k, got: distinct });
    }
    let dim = points[0].dim;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut model = Centroids {
        dim,
        seed,
        iterations: 0,
        inertia: f64::INFINITY,
        inertia_history: Vec::new(),
        vectors: seed_centers(points, k, dim, &mut rng),
    };
    let mut assignment: Vec<usize> = Vec::new();
    for _ in 0..max_iters.max(1) {
        let next: Vec<(usize, f64)> = points.par_iter().map(|p| model.assign(p)).collect();
        let inertia: f64 = next.iter().map(|&(_, s)| 1.0 - s).sum();
        model.iterations += 1;
        model.inertia = inertia;
        model.inertia_history.push(inertia);
        let labels: Vec<usize> = next.into_iter().map(|(c, _)| c).collect();
        if labels == assignment {
            break;
        }
        assignment = labels;
        let mut sums = vec![vec![0.0f64; dim as usize]; k];
        for (p, &c) in points.iter().zip(&assignment) {
            for &(i, v) in &p.entries {
                sums[c][i as usize] += v as f64;
            }
        }
        for (c, mut s) in sums.into_iter().enumerate() {
            if normalize(&mut s) {
                model.vectors[c] = s.into_iter().map(|x| x as f32).collect();
            }
        }
    }
    Ok(model)
}
