//! Agreement metrics, separation diagnostics and the large-`p` consistency
//! conditions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{AsymptoticLimits, DissimilarityMatrix, LabelVector, SymmetricMatrix};

fn contingency(a: &LabelVector, b: &LabelVector) -> Result<Vec<Vec<u64>>> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    let mut table = vec![vec![0u64; b.k()]; a.k()];
    for (&x, &y) in a.as_slice().iter().zip(b.as_slice()) {
        table[x][y] += 1;
    }
    Ok(table)
}

fn pairs(n: u64) -> i128 {
    i128::from(n) * (i128::from(n) - 1) / 2
}

/// Hubert-Arabie adjusted Rand index.
///
/// All pair counts are kept in integers and combined with a single division,
/// so chance-level agreement comes out as exactly `0.0`. When the index is
/// undefined (both partitions trivial in the same way) the result is `1.0`.
pub fn adjusted_rand_index(a: &LabelVector, b: &LabelVector) -> Result<f64> {
    let table = contingency(a, b)?;
    if a.len() < 2 {
        return Err(Error::TooFewObjects {
            needed: 2,
            got: a.len(),
        });
    }
    let total = pairs(a.len() as u64);
    let index: i128 = table.iter().flatten().map(|&c| pairs(c)).sum();
    let sum_a: i128 = table.iter().map(|row| pairs(row.iter().sum())).sum();
    let sum_b: i128 = (0..b.k())
        .map(|j| pairs(table.iter().map(|row| row[j]).sum()))
        .sum();
    let numerator = 2 * (index * total - sum_a * sum_b);
    let denominator = (sum_a + sum_b) * total - 2 * sum_a * sum_b;
    if denominator == 0 {
        return Ok(1.0);
    }
    Ok(numerator as f64 / denominator as f64)
}

pub const MAX_MATCHED_CLUSTERS: usize = 8;

/// Minimum number of misassigned objects over all one-to-one matchings of
/// predicted clusters to true clusters. Objects in predicted clusters left
/// unmatched count as errors.
pub fn error_count(pred: &LabelVector, truth: &LabelVector) -> Result<usize> {
    let table = contingency(pred, truth)?;
    let size = pred.k().max(truth.k());
    if size > MAX_MATCHED_CLUSTERS {
        return Err(Error::TooManyClusters {
            max: MAX_MATCHED_CLUSTERS,
            got: size,
        });
    }
    let cell = |i: usize, j: usize| -> u64 {
        table.get(i).and_then(|r| r.get(j)).copied().unwrap_or(0)
    };
    let mut perm: Vec<usize> = (0..size).collect();
    let mut best = 0u64;
    permutations(&mut perm, 0, &mut |p| {
        let agree = p.iter().enumerate().map(|(i, &j)| cell(i, j)).sum();
        best = best.max(agree);
    });
    Ok(pred.len() - best as usize)
}

fn permutations(items: &mut [usize], start: usize, visit: &mut dyn FnMut(&[usize])) {
    if start == items.len() {
        visit(items);
        return;
    }
    for i in start..items.len() {
        items.swap(start, i);
        permutations(items, start + 1, visit);
        items.swap(start, i);
    }
}

/// Extremes of `Xi` inside and across the true clusters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Separation {
    pub max_within: f64,
    pub min_between: f64,
}

impl Separation {
    /// Every within-cluster entry is smaller than every between-cluster entry.
    pub fn holds(&self) -> bool {
        self.max_within < self.min_between
    }
}

/// Largest within-cluster and smallest between-cluster entry of `xi`.
///
/// Requires at least two clusters with at least two members each.
pub fn separation_stat(xi: &DissimilarityMatrix, truth: &LabelVector) -> Result<Separation> {
    let n = xi.n();
    if truth.len() != n {
        return Err(Error::LengthMismatch(truth.len(), n));
    }
    let counts = truth.counts();
    if counts.iter().filter(|&&c| c > 0).count() < 2 {
        return Err(Error::DegeneratePartition("need at least two clusters".into()));
    }
    if let Some(c) = counts.iter().position(|&c| c == 1) {
        return Err(Error::DegeneratePartition(format!(
            "cluster {} has a single member",
            c + 1
        )));
    }
    let l = truth.as_slice();
    let mut sep = Separation {
        max_within: f64::NEG_INFINITY,
        min_between: f64::INFINITY,
    };
    for i in 0..n {
        for j in (i + 1)..n {
            let v = xi.get(i, j);
            if l[i] == l[j] {
                sep.max_within = sep.max_within.max(v);
            } else {
                sep.min_between = sep.min_between.min(v);
            }
        }
    }
    Ok(sep)
}

/// Which large-`p` consistency conditions hold for a pair of clusters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairConditions {
    pub k: usize,
    pub l: usize,
    /// Classical hierarchical clustering merges within-cluster pairs first:
    /// `sqrt(2) sigma_a < sqrt(delta^2 + sigma_k^2 + sigma_l^2)` for both
    /// `a = k` and `a = l`.
    pub classical_hclust_ok: bool,
    /// Distance-vector clustering on `D`: `sigma_k != sigma_l` or
    /// `delta^2 > 0`.
    pub dv_distance_ok: bool,
    /// Distance-vector clustering on `S`: `delta^2 > 0`.
    pub dv_gram_ok: bool,
}

/// Evaluates the conditions for every unordered pair `k < l` (0-based).
pub fn sufficient_condition_check(lim: &AsymptoticLimits) -> Vec<PairConditions> {
    let kk = lim.n_clusters();
    let mut out = Vec::new();
    for k in 0..kk {
        for l in (k + 1)..kk {
            let (sk, sl) = (lim.sigma_sq(k), lim.sigma_sq(l));
            let delta = lim.delta_sq(k, l);
            let between = (delta + sk + sl).sqrt();
            let within = |s: f64| (2.0 * s).sqrt();
            out.push(PairConditions {
                k,
                l,
                classical_hclust_ok: within(sk) < between && within(sl) < between,
                dv_distance_ok: sk != sl || delta > 0.0,
                dv_gram_ok: delta > 0.0,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lv(labels: &[usize]) -> LabelVector {
        LabelVector::from_one_based(labels).unwrap()
    }

    #[test]
    fn ari_examples() {
        assert_eq!(adjusted_rand_index(&lv(&[1, 1, 2, 3]), &lv(&[1, 1, 2, 3])).unwrap(), 1.0);
        assert_eq!(adjusted_rand_index(&lv(&[1, 1, 2, 2]), &lv(&[1, 2, 1, 2])).unwrap(), -0.5);
        assert_eq!(adjusted_rand_index(&lv(&[1, 1, 1, 1, 1]), &lv(&[1, 2, 2, 1, 3])).unwrap(), 0.0);
        // Both all-singletons: undefined index, reported as 1.
        assert_eq!(adjusted_rand_index(&lv(&[1, 2, 3]), &lv(&[3, 1, 2])).unwrap(), 1.0);
        assert!(matches!(
            adjusted_rand_index(&lv(&[1, 2]), &lv(&[1, 2, 1])),
            Err(Error::LengthMismatch(2, 3))
        ));
    }

    #[test]
    fn error_count_examples() {
        assert_eq!(error_count(&lv(&[1, 1, 2, 2]), &lv(&[1, 1, 2, 2])).unwrap(), 0);
        assert_eq!(error_count(&lv(&[2, 2, 1, 1]), &lv(&[1, 1, 2, 2])).unwrap(), 0);
        assert_eq!(error_count(&lv(&[1, 1, 1, 2]), &lv(&[1, 1, 2, 2])).unwrap(), 1);
        // pred has an extra cluster: its member is charged.
        assert_eq!(error_count(&lv(&[1, 1, 3, 2]), &lv(&[1, 1, 2, 2])).unwrap(), 1);
        let nine: Vec<usize> = (1..=9).collect();
        assert!(matches!(
            error_count(&lv(&nine), &lv(&nine)),
            Err(Error::TooManyClusters { .. })
        ));
    }

    #[test]
    fn separation_examples() {
        let truth = lv(&[1, 1, 2, 2]);
        let xi = DissimilarityMatrix::from_upper(4, |i, j| if (i < 2) == (j < 2) { 0.0 } else { 5.0 })
            .unwrap();
        let sep = separation_stat(&xi, &truth).unwrap();
        assert_eq!((sep.max_within, sep.min_between), (0.0, 5.0));
        assert!(sep.holds());
        let flat = DissimilarityMatrix::from_upper(4, |_, _| 2.0).unwrap();
        let sep = separation_stat(&flat, &truth).unwrap();
        assert_eq!((sep.max_within, sep.min_between), (2.0, 2.0));
        assert!(!sep.holds());
        assert!(separation_stat(&flat, &lv(&[1, 1, 1, 2])).is_err());
        assert!(separation_stat(&flat, &lv(&[1, 1, 1, 1])).is_err());
    }

    #[test]
    fn condition_examples() {
        let same = AsymptoticLimits::isotropic(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        let c = sufficient_condition_check(&same)[0];
        assert!(!c.classical_hclust_ok && !c.dv_distance_ok && !c.dv_gram_ok);

        let ex2 = AsymptoticLimits::isotropic(&[0.0, 0.0], &[1.0, 2.0]).unwrap();
        let c = sufficient_condition_check(&ex2)[0];
        assert!(c.dv_distance_ok && !c.dv_gram_ok);
        // sqrt(2 * 2) > sqrt(1 + 2): the wider cluster breaks classical merging.
        assert!(!c.classical_hclust_ok);

        let ex3 = AsymptoticLimits::isotropic(&[0.1, -0.1], &[1.0, 1.5]).unwrap();
        let c = sufficient_condition_check(&ex3)[0];
        assert!(c.dv_distance_ok && c.dv_gram_ok);
    }
}
