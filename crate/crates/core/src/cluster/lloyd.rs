//! Lloyd's k-means on the raw rows.

use rand::seq::index::sample;
use rayon::prelude::*;

use super::{argmin, KmeansConfig};
use crate::error::Result;
use crate::pairwise::squared_distance;
use crate::types::{DataMatrix, LabelVector};

#[derive(Debug, Clone, PartialEq)]
pub struct LloydResult {
    pub labels: LabelVector,
    /// Within-cluster sum of squared Euclidean distances.
    pub sse: f64,
    pub converged: bool,
    pub restart: usize,
}

fn centres(x: &DataMatrix, labels: &[usize], k: usize) -> Vec<Vec<f64>> {
    let p = x.n_cols();
    let mut sums = vec![vec![0.0; p]; k];
    let mut sizes = vec![0usize; k];
    for (row, &c) in x.rows().zip(labels) {
        sizes[c] += 1;
        sums[c].iter_mut().zip(row).for_each(|(a, v)| *a += v);
    }
    for (sum, &size) in sums.iter_mut().zip(&sizes) {
        let size = size.max(1) as f64;
        sum.iter_mut().for_each(|a| *a /= size);
    }
    sums
}

fn sse(x: &DataMatrix, labels: &[usize], centres: &[Vec<f64>]) -> f64 {
    x.rows()
        .zip(labels)
        .map(|(row, &c)| squared_distance(row, &centres[c]))
        .sum()
}

fn single_run(x: &DataMatrix, cfg: &KmeansConfig, restart: usize) -> (Vec<usize>, f64, bool) {
    let n = x.n_rows();
    let k = cfg.k;
    let mut rng = cfg.restart_rng(restart);
    let mut cents: Vec<Vec<f64>> = sample(&mut rng, n, k)
        .into_iter()
        .map(|i| x.row(i).to_vec())
        .collect();
    let mut labels: Vec<usize> = Vec::new();
    let mut converged = false;
    for _ in 0..cfg.max_iter {
        let dists: Vec<Vec<f64>> = x
            .rows()
            .map(|row| cents.iter().map(|c| squared_distance(row, c)).collect())
            .collect();
        let mut next: Vec<usize> = dists.iter().map(|d| argmin(d.iter().copied())).collect();
        let mut sizes = vec![0usize; k];
        next.iter().for_each(|&c| sizes[c] += 1);
        while let Some(empty) = sizes.iter().position(|&s| s == 0) {
            let mut best: Option<(usize, f64)> = None;
            for (i, &c) in next.iter().enumerate() {
                if sizes[c] >= 2 && best.is_none_or(|(_, b)| dists[i][c] > b) {
                    best = Some((i, dists[i][c]));
                }
            }
            let (i, _) = best.expect("k <= n leaves a cluster with two members");
            sizes[next[i]] -= 1;
            next[i] = empty;
            sizes[empty] += 1;
        }
        if next == labels {
            converged = true;
            break;
        }
        labels = next;
        cents = centres(x, &labels, k);
    }
    let total = sse(x, &labels, &cents);
    (labels, total, converged)
}

/// Best-of-restarts Lloyd iteration. Each restart seeds its centres with `k`
/// distinct rows drawn uniformly at random. An emptied cluster takes the
/// object farthest from its centre among clusters with at least two members.
pub fn lloyd_kmeans(x: &DataMatrix, cfg: &KmeansConfig) -> Result<LloydResult> {
    cfg.validate(x.n_rows())?;
    let runs: Vec<_> = (0..cfg.n_restarts)
        .into_par_iter()
        .map(|r| single_run(x, cfg, r))
        .collect();
    let best = runs
        .iter()
        .enumerate()
        .fold(0, |b, (r, run)| if run.1 < runs[b].1 { r } else { b });
    let (labels, sse, converged) = runs[best].clone();
    Ok(LloydResult {
        labels: LabelVector::new(labels, cfg.k)?,
        sse,
        converged,
        restart: best,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn column(vals: &[f64]) -> DataMatrix {
        DataMatrix::new(vals.len(), 1, vals.to_vec()).unwrap()
    }

    #[test]
    fn separates_pairs() {
        let res = lloyd_kmeans(&column(&[0.0, 0.1, 10.0, 10.1]), &KmeansConfig::new(2, 0)).unwrap();
        let l = res.labels.as_slice();
        assert_eq!(l[0], l[1]);
        assert_eq!(l[2], l[3]);
        assert_ne!(l[0], l[2]);
        assert!((res.sse - 0.01).abs() < 1e-9);
    }

    #[test]
    fn k_equals_n_has_zero_sse() {
        let res = lloyd_kmeans(&column(&[3.0, 1.0, 4.0, 1.5, 9.0]), &KmeansConfig::new(5, 2))
            .unwrap();
        assert_eq!(res.sse, 0.0);
    }

    #[test]
    fn invalid_k() {
        assert_eq!(
            lloyd_kmeans(&column(&[0.0, 1.0]), &KmeansConfig::new(3, 0)).unwrap_err(),
            Error::InvalidK { k: 3, n: 2 }
        );
    }
}
