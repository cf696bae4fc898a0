//! k-means-type clustering of distance (or inner-product) vectors.
//!
//! Object `i` is described by row `i` of `M` with its own coordinate `i`
//! removed. The centroid of cluster `k` at coordinate `j` averages `m_ij`
//! over members `i != j`, and the objective is
//!
//! ```text
//! Q = sum_i sum_{j != i} (m_ij - c_{k(i), j})^2
//! ```
//!
//! which agrees with the "min over clusters" form at every Lloyd fixed point.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{argmin, random_surjection, KmeansConfig};
use crate::error::{Error, Result};
use crate::types::{LabelVector, SymmetricMatrix};

/// How a centroid entry is normalised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum CentroidRule {
    /// Divide by the number of summands: `n_k - 1` when `j` is a member of
    /// the cluster, `n_k` otherwise. Every centroid entry is a true mean.
    #[default]
    CountMatched,
    /// Always divide by `n_k - 1` (floored at 1), whether or not `j` belongs
    /// to the cluster.
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    /// The assignment vector repeated.
    Converged,
    /// `max_iter` reached.
    MaxIter,
    /// The next assignment would have raised the objective; the previous one
    /// was kept.
    Stalled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DvKmeansResult {
    pub labels: LabelVector,
    pub objective: f64,
    pub stop: StopReason,
    /// Restart that produced `labels`.
    pub restart: usize,
    /// Objective after initialisation and after every accepted iteration,
    /// one sequence per restart.
    pub traces: Vec<Vec<f64>>,
}

impl DvKmeansResult {
    pub fn converged(&self) -> bool {
        self.stop == StopReason::Converged
    }

    /// True when no restart's objective ever increased.
    pub fn objective_non_increasing(&self) -> bool {
        self.traces
            .iter()
            .all(|t| t.windows(2).all(|w| w[1] <= w[0]))
    }
}

struct Centroids {
    k: usize,
    n: usize,
    values: Vec<f64>,
    /// False where no member contributes (singleton cluster at its own index).
    defined: Vec<bool>,
}

impl Centroids {
    fn compute<M: SymmetricMatrix + ?Sized>(
        m: &M,
        labels: &[usize],
        k: usize,
        rule: CentroidRule,
    ) -> Self {
        let n = m.n();
        let mut sums = vec![0.0; k * n];
        let mut sizes = vec![0usize; k];
        for (i, &c) in labels.iter().enumerate() {
            sizes[c] += 1;
            let row = m.row(i);
            let acc = &mut sums[c * n..(c + 1) * n];
            for (j, (a, &v)) in acc.iter_mut().zip(row).enumerate() {
                if j != i {
                    *a += v;
                }
            }
        }
        let mut defined = vec![true; k * n];
        for c in 0..k {
            for j in 0..n {
                let own = usize::from(labels[j] == c);
                let count = sizes[c] - own;
                let idx = c * n + j;
                if count == 0 {
                    defined[idx] = false;
                    sums[idx] = 0.0;
                    continue;
                }
                let divisor = match rule {
                    CentroidRule::CountMatched => count,
                    CentroidRule::Literal => sizes[c].saturating_sub(1).max(1),
                };
                sums[idx] /= divisor as f64;
            }
        }
        Self {
            k,
            n,
            values: sums,
            defined,
        }
    }

    fn cost(&self, row: &[f64], i: usize, c: usize) -> f64 {
        let centre = &self.values[c * self.n..(c + 1) * self.n];
        let defined = &self.defined[c * self.n..(c + 1) * self.n];
        let mut acc = 0.0;
        for j in 0..self.n {
            if j != i && defined[j] {
                let d = row[j] - centre[j];
                acc += d * d;
            }
        }
        acc
    }
}

fn objective<M: SymmetricMatrix + ?Sized>(m: &M, labels: &[usize], cents: &Centroids) -> f64 {
    labels
        .iter()
        .enumerate()
        .map(|(i, &c)| cents.cost(m.row(i), i, c))
        .sum()
}

/// The objective of `labels` under `rule`.
pub fn dv_objective<M: SymmetricMatrix + ?Sized>(
    m: &M,
    labels: &LabelVector,
    rule: CentroidRule,
) -> Result<f64> {
    if labels.len() != m.n() {
        return Err(Error::LengthMismatch(labels.len(), m.n()));
    }
    let cents = Centroids::compute(m, labels.as_slice(), labels.k(), rule);
    Ok(objective(m, labels.as_slice(), &cents))
}

/// Moves objects into empty clusters. The object with the largest cost under
/// `cents` among clusters of size two or more is moved first.
fn repair_empty<M: SymmetricMatrix + ?Sized>(
    m: &M,
    labels: &mut [usize],
    cents: &Centroids,
) {
    let mut sizes = vec![0usize; cents.k];
    labels.iter().for_each(|&c| sizes[c] += 1);
    while let Some(empty) = sizes.iter().position(|&s| s == 0) {
        let mut best: Option<(usize, f64)> = None;
        for (i, &c) in labels.iter().enumerate() {
            if sizes[c] < 2 {
                continue;
            }
            let cost = cents.cost(m.row(i), i, c);
            if best.is_none_or(|(_, b)| cost > b) {
                best = Some((i, cost));
            }
        }
        let (i, _) = best.expect("k <= n leaves a cluster with two members");
        sizes[labels[i]] -= 1;
        labels[i] = empty;
        sizes[empty] += 1;
    }
}

struct Run {
    labels: Vec<usize>,
    objective: f64,
    stop: StopReason,
    trace: Vec<f64>,
}

fn single_run<M: SymmetricMatrix + ?Sized>(m: &M, cfg: &KmeansConfig, restart: usize) -> Run {
    let n = m.n();
    let k = cfg.k;
    let mut rng = cfg.restart_rng(restart);
    let mut labels = random_surjection(n, k, &mut rng);
    let mut cents = Centroids::compute(m, &labels, k, cfg.centroid_rule);
    let mut q = objective(m, &labels, &cents);
    let mut trace = vec![q];
    let mut stop = StopReason::MaxIter;

    for _ in 0..cfg.max_iter {
        let mut next: Vec<usize> = (0..n)
            .map(|i| {
                let row = m.row(i);
                argmin((0..k).map(|c| cents.cost(row, i, c)))
            })
            .collect();
        repair_empty(m, &mut next, &cents);
        if next == labels {
            stop = StopReason::Converged;
            break;
        }
        let next_cents = Centroids::compute(m, &next, k, cfg.centroid_rule);
        let next_q = objective(m, &next, &next_cents);
        if next_q > q {
            stop = StopReason::Stalled;
            break;
        }
        labels = next;
        cents = next_cents;
        q = next_q;
        trace.push(q);
    }
    Run {
        labels,
        objective: q,
        stop,
        trace,
    }
}

/// Best of `cfg.n_restarts` Lloyd-style runs on the rows of `m`.
///
/// Each run starts from a uniformly random labeling that uses all `k`
/// clusters, then alternates assignment (lowest cluster index wins ties) and
/// centroid updates until the assignment repeats or `max_iter` is reached.
pub fn dv_kmeans<M: SymmetricMatrix + ?Sized>(m: &M, cfg: &KmeansConfig) -> Result<DvKmeansResult> {
    let n = m.n();
    if n < 3 {
        return Err(Error::TooFewObjects { needed: 3, got: n });
    }
    cfg.validate(n)?;
    let runs: Vec<Run> = (0..cfg.n_restarts)
        .into_par_iter()
        .map(|r| single_run(m, cfg, r))
        .collect();
    let best = runs
        .iter()
        .enumerate()
        .fold(0, |best, (r, run)| {
            if run.objective < runs[best].objective {
                r
            } else {
                best
            }
        });
    let labels = LabelVector::new(runs[best].labels.clone(), cfg.k)?;
    Ok(DvKmeansResult {
        labels,
        objective: runs[best].objective,
        stop: runs[best].stop,
        restart: best,
        traces: runs.into_iter().map(|r| r.trace).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::DissimilarityMatrix;

    fn blocks() -> DissimilarityMatrix {
        DissimilarityMatrix::from_upper(6, |i, j| if (i < 3) == (j < 3) { 0.0 } else { 10.0 })
            .unwrap()
    }

    #[test]
    fn recovers_two_blocks() {
        let res = dv_kmeans(&blocks(), &KmeansConfig::new(2, 1)).unwrap();
        let l = res.labels.as_slice();
        assert!(l[..3].iter().all(|&c| c == l[0]));
        assert!(l[3..].iter().all(|&c| c == l[3]));
        assert_ne!(l[0], l[3]);
        assert_eq!(res.objective, 0.0);
        assert!(res.objective_non_increasing());
    }

    #[test]
    fn k_equals_n_gives_singletons() {
        let d = DissimilarityMatrix::from_upper(5, |i, j| (i * 7 + j * 3) as f64 % 5.0 + 1.0)
            .unwrap();
        let res = dv_kmeans(&d, &KmeansConfig::new(5, 3)).unwrap();
        let mut seen = res.labels.counts();
        seen.sort();
        assert_eq!(seen, vec![1; 5]);
        assert_eq!(res.objective, 0.0);
    }

    #[test]
    fn one_cluster_objective_is_total_scatter() {
        let d = DissimilarityMatrix::from_upper(4, |i, j| (i + 2 * j) as f64).unwrap();
        let res = dv_kmeans(&d, &KmeansConfig::new(1, 0)).unwrap();
        let n = 4;
        let mut expected = 0.0;
        for i in 0..n {
            for j in (0..n).filter(|&j| j != i) {
                let mean = (0..n).filter(|&t| t != j).map(|t| d.get(t, j)).sum::<f64>()
                    / (n - 1) as f64;
                expected += (d.get(i, j) - mean).powi(2);
            }
        }
        assert!((res.objective - expected).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        let d = DissimilarityMatrix::from_condensed(2, &[1.0]).unwrap();
        assert!(matches!(
            dv_kmeans(&d, &KmeansConfig::new(1, 0)),
            Err(Error::TooFewObjects { .. })
        ));
        assert_eq!(
            dv_kmeans(&blocks(), &KmeansConfig::new(7, 0)).unwrap_err(),
            Error::InvalidK { k: 7, n: 6 }
        );
    }

    #[test]
    fn literal_rule_differs_off_cluster() {
        let d = blocks();
        let labels = LabelVector::new(vec![0, 0, 0, 1, 1, 1], 2).unwrap();
        assert_eq!(dv_objective(&d, &labels, CentroidRule::CountMatched).unwrap(), 0.0);
        // Off-cluster entries are summed over 3 members but divided by 2.
        assert!(dv_objective(&d, &labels, CentroidRule::Literal).unwrap() > 0.0);
        let res = dv_kmeans(&d, &KmeansConfig::new(2, 0).with_centroid_rule(CentroidRule::Literal))
            .unwrap();
        assert!(res.objective_non_increasing());
    }

    #[test]
    fn restarts_are_deterministic() {
        let d = DissimilarityMatrix::from_upper(9, |i, j| ((i * 31 + j * 17) % 11) as f64).unwrap();
        let cfg = KmeansConfig::new(3, 42);
        assert_eq!(dv_kmeans(&d, &cfg).unwrap(), dv_kmeans(&d, &cfg).unwrap());
    }
}
