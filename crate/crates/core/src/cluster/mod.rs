//! Clustering engines.
//!
//! * [`dv_kmeans`]: k-means-type clustering of the rows of `D` or `S`, where
//!   object `i`'s own coordinate is left out of every comparison.
//! * [`agglomerative`]: Lance-Williams agglomeration on any dissimilarity.
//! * [`dv_hierarchical`]: `D` or `S`, then the distance-vector transform,
//!   then agglomeration.
//! * [`lloyd_kmeans`]: plain k-means on the raw rows, a baseline.

mod agglomerative;
mod dv_kmeans;
mod lloyd;
mod methods;
mod oracle;

pub use agglomerative::{agglomerative, Dendrogram, Linkage, Merge};
pub use dv_kmeans::{dv_kmeans, dv_objective, CentroidRule, DvKmeansResult, StopReason};
pub use lloyd::{lloyd_kmeans, LloydResult};
pub use methods::{distance_vectors, dv_hierarchical, run_method, Method, MethodOutcome, Source};
pub use oracle::{dv_kmeans_oracle, ORACLE_MAX_OBJECTS};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Settings shared by both k-means engines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KmeansConfig {
    pub k: usize,
    pub n_restarts: usize,
    pub max_iter: usize,
    pub seed: u64,
    pub centroid_rule: CentroidRule,
}

impl KmeansConfig {
    pub fn new(k: usize, seed: u64) -> Self {
        Self {
            k,
            n_restarts: 10,
            max_iter: 100,
            seed,
            centroid_rule: CentroidRule::CountMatched,
        }
    }

    pub fn with_restarts(mut self, n_restarts: usize) -> Self {
        self.n_restarts = n_restarts;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_centroid_rule(mut self, rule: CentroidRule) -> Self {
        self.centroid_rule = rule;
        self
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.k < 1 || self.k > n {
            return Err(Error::InvalidK { k: self.k, n });
        }
        if self.n_restarts < 1 {
            return Err(Error::InvalidParameter("n_restarts must be >= 1".into()));
        }
        if self.max_iter < 1 {
            return Err(Error::InvalidParameter("max_iter must be >= 1".into()));
        }
        Ok(())
    }

    /// Generator for one restart. Streams are `seed ^ restart`, so restarts
    /// can run in any order or concurrently.
    pub(crate) fn restart_rng(&self, restart: usize) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ restart as u64)
    }
}

/// Uniformly random labeling that uses every one of the `k` labels.
///
/// Rejection sampling is exact but needs too many draws once `k` approaches
/// `n`; after a fixed budget the first `k` objects of a random permutation
/// are pinned to distinct labels and the rest are drawn uniformly.
pub(crate) fn random_surjection<R: Rng>(n: usize, k: usize, rng: &mut R) -> Vec<usize> {
    const BUDGET: usize = 64;
    let mut labels = vec![0; n];
    let mut seen = vec![false; k];
    for _ in 0..BUDGET {
        seen.fill(false);
        for l in labels.iter_mut() {
            *l = rng.random_range(0..k);
            seen[*l] = true;
        }
        if seen.iter().all(|&s| s) {
            return labels;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    for (rank, &i) in order.iter().enumerate() {
        labels[i] = if rank < k { rank } else { rng.random_range(0..k) };
    }
    labels
}

/// Index of the smallest value; the lowest index wins ties.
pub(crate) fn argmin(values: impl IntoIterator<Item = f64>) -> usize {
    let mut best = (0, f64::INFINITY);
    for (idx, v) in values.into_iter().enumerate() {
        if v < best.1 {
            best = (idx, v);
        }
    }
    best.0
}
