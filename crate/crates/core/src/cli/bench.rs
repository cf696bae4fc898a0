//! Replicated benchmark over the synthetic settings.

use rand::RngCore;
use rayon::prelude::*;
use serde::Serialize;

use crate::cluster::{run_method, KmeansConfig, Method};
use crate::error::Result;
use crate::evaluation::adjusted_rand_index;
use crate::pairwise::standardize_columns;
use crate::simgen::{gen_setting_replicate, substream, SettingSpec};

/// Stream offset used for per-replicate clustering seeds, kept apart from the
/// data substreams.
const CLUSTER_SEED_SALT: u64 = 0xC1A5_7E55_EED0_0001;

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub spec: SettingSpec,
    pub methods: Vec<Method>,
    pub reps: usize,
    pub restarts: usize,
    pub max_iter: usize,
}

/// One line of a benchmark table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub method: Method,
    pub reps: usize,
    pub mean_ari: f64,
    /// Sample standard deviation of the ARI over replicates.
    pub sd_ari: f64,
    /// `sd_ari / sqrt(reps)`.
    pub se_ari: f64,
    /// Datasets redrawn because a true cluster was empty, over all replicates.
    pub rejections: u64,
    /// For the distance-vector k-means methods: whether the objective was
    /// non-increasing in every restart of every replicate.
    pub q_monotone: Option<bool>,
    pub ari: Vec<f64>,
}

struct ReplicateResult {
    ari: Vec<f64>,
    monotone: Vec<Option<bool>>,
    rejections: u64,
}

fn run_replicate(cfg: &BenchConfig, r: usize) -> Result<ReplicateResult> {
    let data = gen_setting_replicate(&cfg.spec, r as u64)?;
    let x = standardize_columns(&data.x)?;
    let seed = substream(cfg.spec.seed ^ CLUSTER_SEED_SALT, r as u64).next_u64();
    let km = KmeansConfig::new(data.truth.k(), seed)
        .with_restarts(cfg.restarts)
        .with_max_iter(cfg.max_iter);
    let mut ari = Vec::with_capacity(cfg.methods.len());
    let mut monotone = Vec::with_capacity(cfg.methods.len());
    for &m in &cfg.methods {
        let out = run_method(&x, m, &km)?;
        ari.push(adjusted_rand_index(&out.labels, &data.truth)?);
        monotone.push(out.objective_non_increasing);
    }
    Ok(ReplicateResult {
        ari,
        monotone,
        rejections: data.rejections,
    })
}

/// Runs every method on `reps` standardized replicates. Replicates run in
/// parallel on the current rayon pool; the result does not depend on its
/// size.
pub fn run_bench(cfg: &BenchConfig) -> Result<Vec<BenchRow>> {
    if cfg.reps == 0 {
        return Err(crate::Error::InvalidParameter("reps must be >= 1".into()));
    }
    cfg.spec.validate()?;
    let reps: Vec<ReplicateResult> = (0..cfg.reps)
        .into_par_iter()
        .map(|r| run_replicate(cfg, r))
        .collect::<Result<_>>()?;
    let rejections = reps.iter().map(|r| r.rejections).sum();
    let n = cfg.reps as f64;
    Ok(cfg
        .methods
        .iter()
        .enumerate()
        .map(|(mi, &method)| {
            let ari: Vec<f64> = reps.iter().map(|r| r.ari[mi]).collect();
            let mean = ari.iter().sum::<f64>() / n;
            let sd = if cfg.reps > 1 {
                (ari.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
            } else {
                0.0
            };
            let q_monotone = reps
                .iter()
                .map(|r| r.monotone[mi])
                .try_fold(true, |acc, m| m.map(|m| acc && m));
            BenchRow {
                method,
                reps: cfg.reps,
                mean_ari: mean,
                sd_ari: sd,
                se_ari: sd / n.sqrt(),
                rejections,
                q_monotone,
                ari,
            }
        })
        .collect())
}
