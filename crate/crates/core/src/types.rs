//! Domain types shared by every module.
//!
//! All types validate on construction and are immutable afterwards, so they
//! can be shared freely across threads.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An `N x p` matrix of observations, stored row-major. Rows are objects.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    n_rows: usize,
    n_cols: usize,
    values: Vec<f64>,
}

impl DataMatrix {
    /// Builds a matrix from row-major values. Requires `N >= 2`, `p >= 1`
    /// and finite entries.
    pub fn new(n_rows: usize, n_cols: usize, values: Vec<f64>) -> Result<Self> {
        if n_rows < 2 {
            return Err(Error::InvalidShape(format!(
                "need at least 2 rows, got {n_rows}"
            )));
        }
        if n_cols < 1 {
            return Err(Error::InvalidShape("need at least 1 column".into()));
        }
        if values.len() != n_rows * n_cols {
            return Err(Error::InvalidShape(format!(
                "{} values for a {n_rows}x{n_cols} matrix",
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / n_cols,
                col: pos % n_cols,
            });
        }
        Ok(Self {
            n_rows,
            n_cols,
            values,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n_cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != n_cols) {
            return Err(Error::InvalidShape(format!(
                "row {bad} has {} columns, expected {n_cols}",
                rows[bad].len()
            )));
        }
        Self::new(rows.len(), n_cols, rows.concat())
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.n_cols)
    }

    pub fn get(&self, i: usize, s: usize) -> f64 {
        self.values[i * self.n_cols + s]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn column(&self, s: usize) -> Vec<f64> {
        self.rows().map(|r| r[s]).collect()
    }

    /// Rows reordered so that row `i` of the result is row `order[i]` here.
    pub fn select_rows(&self, order: &[usize]) -> Result<Self> {
        let mut values = Vec::with_capacity(order.len() * self.n_cols);
        for &i in order {
            values.extend_from_slice(self.row(i));
        }
        Self::new(order.len(), self.n_cols, values)
    }
}

/// Read access shared by [`DissimilarityMatrix`] and [`GramMatrix`].
///
/// Both are dense, symmetric and stored in full so that rows are contiguous.
pub trait SymmetricMatrix: Sync {
    fn n(&self) -> usize;
    fn row(&self, i: usize) -> &[f64];
    fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i)[j]
    }
}

fn mirrored<F>(n: usize, mut entry: F, diag: impl Fn(usize) -> f64) -> Vec<f64>
where
    F: FnMut(usize, usize) -> f64,
{
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        values[i * n + i] = diag(i);
        for j in (i + 1)..n {
            let v = entry(i, j);
            values[i * n + j] = v;
            values[j * n + i] = v;
        }
    }
    values
}

fn check_symmetric(n: usize, values: &[f64]) -> Result<()> {
    if values.len() != n * n {
        return Err(Error::InvalidShape(format!(
            "{} values for a {n}x{n} matrix",
            values.len()
        )));
    }
    if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            row: pos / n,
            col: pos % n,
        });
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if values[i * n + j] != values[j * n + i] {
                return Err(Error::NotSymmetric(i, j));
            }
        }
    }
    Ok(())
}

/// Symmetric, nonnegative `N x N` matrix with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DissimilarityMatrix {
    n: usize,
    values: Vec<f64>,
}

impl DissimilarityMatrix {
    /// Evaluates `entry(i, j)` once for each `i < j` and mirrors it.
    pub fn from_upper<F>(n: usize, entry: F) -> Result<Self>
    where
        F: FnMut(usize, usize) -> f64,
    {
        Self::validated(n, mirrored(n, entry, |_| 0.0))
    }

    /// Builds from precomputed strict upper-triangle entries in row order
    /// `(0,1), (0,2), .., (1,2), ..`.
    pub fn from_condensed(n: usize, upper: &[f64]) -> Result<Self> {
        if upper.len() != n * n.saturating_sub(1) / 2 {
            return Err(Error::InvalidShape(format!(
                "{} condensed entries for n={n}",
                upper.len()
            )));
        }
        let mut it = upper.iter().copied();
        Self::from_upper(n, |_, _| it.next().unwrap_or(f64::NAN))
    }

    /// Validates a full row-major matrix.
    pub fn from_full(n: usize, values: Vec<f64>) -> Result<Self> {
        check_symmetric(n, &values)?;
        Self::validated(n, values)
    }

    fn validated(n: usize, values: Vec<f64>) -> Result<Self> {
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / n,
                col: pos % n,
            });
        }
        for i in 0..n {
            if values[i * n + i] != 0.0 {
                return Err(Error::InvalidEntry {
                    row: i,
                    col: i,
                    reason: "nonzero diagonal",
                });
            }
        }
        if let Some(pos) = values.iter().position(|&v| v < 0.0) {
            return Err(Error::InvalidEntry {
                row: pos / n,
                col: pos % n,
                reason: "negative dissimilarity",
            });
        }
        Ok(Self { n, values })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    /// Simultaneous row/column permutation: entry `(a, b)` of the result is
    /// entry `(order[a], order[b])` here.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        Self::from_upper(order.len(), |a, b| self.get(order[a], order[b]))
    }
}

impl SymmetricMatrix for DissimilarityMatrix {
    fn n(&self) -> usize {
        self.n
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }
}

/// Symmetric inner-product matrix with nonnegative diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    n: usize,
    values: Vec<f64>,
}

impl GramMatrix {
    pub fn from_upper<F, D>(n: usize, entry: F, diag: D) -> Result<Self>
    where
        F: FnMut(usize, usize) -> f64,
        D: Fn(usize) -> f64,
    {
        Self::validated(n, mirrored(n, entry, diag))
    }

    pub fn from_full(n: usize, values: Vec<f64>) -> Result<Self> {
        check_symmetric(n, &values)?;
        Self::validated(n, values)
    }

    fn validated(n: usize, values: Vec<f64>) -> Result<Self> {
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / n,
                col: pos % n,
            });
        }
        for i in 0..n {
            if values[i * n + i] < 0.0 {
                return Err(Error::InvalidEntry {
                    row: i,
                    col: i,
                    reason: "negative squared norm",
                });
            }
        }
        Ok(Self { n, values })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.values[i * self.n + i]).sum()
    }
}

impl SymmetricMatrix for GramMatrix {
    fn n(&self) -> usize {
        self.n
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }
}

/// Cluster assignment of `N` objects into `k` groups.
///
/// Labels are stored 0-based; [`LabelVector::to_one_based`] and
/// [`LabelVector::from_one_based`] are the external representation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LabelVector {
    labels: Vec<usize>,
    k: usize,
}

impl LabelVector {
    /// 0-based labels, each `< k`.
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Self> {
        if let Some(&bad) = labels.iter().find(|&&l| l >= k) {
            return Err(Error::LabelOutOfRange { label: bad + 1, k });
        }
        Ok(Self { labels, k })
    }

    /// 1-based labels; `k` is taken as the largest label.
    pub fn from_one_based(labels: &[usize]) -> Result<Self> {
        let k = labels.iter().copied().max().unwrap_or(0);
        Self::from_one_based_with_k(labels, k)
    }

    pub fn from_one_based_with_k(labels: &[usize], k: usize) -> Result<Self> {
        let mut out = Vec::with_capacity(labels.len());
        for &l in labels {
            if l == 0 || l > k {
                return Err(Error::LabelOutOfRange { label: l, k });
            }
            out.push(l - 1);
        }
        Ok(Self { labels: out, k })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.labels
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.labels.iter().map(|l| l + 1).collect()
    }

    /// Number of members per cluster.
    pub fn counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.k];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// Relabels clusters in order of first appearance, dropping unused labels.
    pub fn canonical(&self) -> Self {
        let mut map = vec![usize::MAX; self.k];
        let mut next = 0;
        let labels = self
            .labels
            .iter()
            .map(|&l| {
                if map[l] == usize::MAX {
                    map[l] = next;
                    next += 1;
                }
                map[l]
            })
            .collect();
        Self { labels, k: next }
    }

    pub fn to_partition(&self) -> Result<ClusterPartition> {
        labels_to_partition(self)
    }
}

/// `K` disjoint, nonempty index sets covering `0..N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterPartition {
    clusters: Vec<Vec<usize>>,
    n: usize,
}

impl ClusterPartition {
    pub fn new(clusters: Vec<Vec<usize>>) -> Result<Self> {
        let n: usize = clusters.iter().map(Vec::len).sum();
        let mut seen = vec![false; n];
        for (c, members) in clusters.iter().enumerate() {
            if members.is_empty() {
                return Err(Error::EmptyCluster(c + 1));
            }
            for &i in members {
                if i >= n || seen[i] {
                    return Err(Error::DegeneratePartition(format!(
                        "index {i} is out of range or repeated"
                    )));
                }
                seen[i] = true;
            }
        }
        Ok(Self { clusters, n })
    }

    pub fn clusters(&self) -> &[Vec<usize>] {
        &self.clusters
    }

    pub fn n_objects(&self) -> usize {
        self.n
    }

    pub fn to_labels(&self) -> LabelVector {
        partition_to_labels(self)
    }
}

/// Groups object indices by label. Fails if some label in `1..=k` is unused.
pub fn labels_to_partition(labels: &LabelVector) -> Result<ClusterPartition> {
    let mut clusters = vec![Vec::new(); labels.k()];
    for (i, &l) in labels.as_slice().iter().enumerate() {
        clusters[l].push(i);
    }
    if let Some(empty) = clusters.iter().position(Vec::is_empty) {
        return Err(Error::EmptyCluster(empty + 1));
    }
    Ok(ClusterPartition {
        n: labels.len(),
        clusters,
    })
}

pub fn partition_to_labels(partition: &ClusterPartition) -> LabelVector {
    let mut labels = vec![0; partition.n];
    for (c, members) in partition.clusters.iter().enumerate() {
        for &i in members {
            labels[i] = c;
        }
    }
    LabelVector {
        labels,
        k: partition.clusters.len(),
    }
}

/// Limiting constants of scaled norms, distances and inner products as the
/// dimension grows with the sample size fixed.
///
/// For clusters `k` and `l`:
/// * `mu_sq[k]`: limit of the mean squared mean coordinate,
/// * `sigma_sq[k]`: limit of the mean coordinate variance,
/// * `delta_sq[k][l]`: limit of the mean squared difference of mean vectors,
/// * `eta[k][l]`: limit of the mean product of mean vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticLimits {
    mu_sq: Vec<f64>,
    sigma_sq: Vec<f64>,
    delta_sq: Vec<Vec<f64>>,
    eta: Vec<Vec<f64>>,
}

impl AsymptoticLimits {
    pub fn new(
        mu_sq: Vec<f64>,
        sigma_sq: Vec<f64>,
        delta_sq: Vec<Vec<f64>>,
        eta: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let k = mu_sq.len();
        let square = |m: &Vec<Vec<f64>>| m.len() == k && m.iter().all(|r| r.len() == k);
        if sigma_sq.len() != k || !square(&delta_sq) || !square(&eta) {
            return Err(Error::InvalidShape(format!(
                "limits for {k} clusters have inconsistent sizes"
            )));
        }
        let all = mu_sq
            .iter()
            .chain(&sigma_sq)
            .chain(delta_sq.iter().flatten())
            .chain(eta.iter().flatten());
        if all.clone().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite limit".into()));
        }
        if mu_sq.iter().any(|&v| v < 0.0) {
            return Err(Error::InvalidParameter("mu_sq must be >= 0".into()));
        }
        if sigma_sq.iter().any(|&v| v <= 0.0) {
            return Err(Error::InvalidParameter("sigma_sq must be > 0".into()));
        }
        for a in 0..k {
            if delta_sq[a][a] != 0.0 {
                return Err(Error::InvalidParameter("delta_sq[k][k] must be 0".into()));
            }
            for b in 0..k {
                if delta_sq[a][b] < 0.0 || delta_sq[a][b] != delta_sq[b][a] {
                    return Err(Error::InvalidParameter(
                        "delta_sq must be symmetric and nonnegative".into(),
                    ));
                }
            }
        }
        Ok(Self {
            mu_sq,
            sigma_sq,
            delta_sq,
            eta,
        })
    }

    /// Limits for Gaussian clusters whose mean vectors have every coordinate
    /// equal to `means[k]` and whose covariance is `variances[k] * I`.
    pub fn isotropic(means: &[f64], variances: &[f64]) -> Result<Self> {
        let k = means.len();
        let mu_sq = means.iter().map(|m| m * m).collect();
        let delta_sq = (0..k)
            .map(|a| (0..k).map(|b| (means[a] - means[b]).powi(2)).collect())
            .collect();
        let eta = (0..k)
            .map(|a| (0..k).map(|b| means[a] * means[b]).collect())
            .collect();
        Self::new(mu_sq, variances.to_vec(), delta_sq, eta)
    }

    pub fn n_clusters(&self) -> usize {
        self.mu_sq.len()
    }

    pub fn mu_sq(&self, k: usize) -> f64 {
        self.mu_sq[k]
    }

    pub fn sigma_sq(&self, k: usize) -> f64 {
        self.sigma_sq[k]
    }

    pub fn delta_sq(&self, k: usize, l: usize) -> f64 {
        self.delta_sq[k][l]
    }

    pub fn eta(&self, k: usize, l: usize) -> f64 {
        self.eta[k][l]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lv(one_based: &[usize], k: usize) -> LabelVector {
        LabelVector::from_one_based_with_k(one_based, k).unwrap()
    }

    #[test]
    fn groups_labels_into_partition() {
        let p = labels_to_partition(&lv(&[1, 1, 2], 2)).unwrap();
        assert_eq!(p.clusters(), &[vec![0, 1], vec![2]]);
    }

    #[test]
    fn all_distinct_labels_give_singletons() {
        let p = labels_to_partition(&lv(&[1, 2, 3], 3)).unwrap();
        assert_eq!(p.clusters(), &[vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn missing_label_is_an_empty_cluster() {
        let err = labels_to_partition(&lv(&[1, 1, 1], 2)).unwrap_err();
        assert_eq!(err, Error::EmptyCluster(2));
    }

    #[test]
    fn label_range_is_checked() {
        assert!(LabelVector::from_one_based_with_k(&[1, 3], 2).is_err());
        assert!(LabelVector::from_one_based_with_k(&[0, 1], 2).is_err());
    }

    #[test]
    fn constructors_reject_non_finite() {
        assert!(matches!(
            DataMatrix::new(2, 2, vec![0.0, 1.0, f64::NAN, 2.0]),
            Err(Error::NonFinite { row: 1, col: 0 })
        ));
        assert!(DissimilarityMatrix::from_full(2, vec![0.0, f64::INFINITY, f64::INFINITY, 0.0])
            .is_err());
        assert!(GramMatrix::from_full(2, vec![1.0, f64::NAN, f64::NAN, 1.0]).is_err());
    }

    #[test]
    fn data_matrix_shape_is_checked() {
        assert!(DataMatrix::new(1, 3, vec![0.0; 3]).is_err());
        assert!(DataMatrix::new(2, 0, vec![]).is_err());
        assert!(DataMatrix::new(2, 2, vec![0.0; 3]).is_err());
    }

    #[test]
    fn dissimilarity_validation() {
        assert!(matches!(
            DissimilarityMatrix::from_full(2, vec![0.0, 1.0, 2.0, 0.0]),
            Err(Error::NotSymmetric(0, 1))
        ));
        assert!(DissimilarityMatrix::from_full(2, vec![1.0, 1.0, 1.0, 0.0]).is_err());
        assert!(DissimilarityMatrix::from_full(2, vec![0.0, -1.0, -1.0, 0.0]).is_err());
        let d = DissimilarityMatrix::from_condensed(3, &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(d.get(2, 1), 3.0);
        assert_eq!(d.get(0, 2), 2.0);
    }

    #[test]
    fn canonical_relabels_by_first_appearance() {
        let l = lv(&[3, 3, 1, 2], 3).canonical();
        assert_eq!(l.as_slice(), &[0, 0, 1, 2]);
    }

    #[test]
    fn limits_validation() {
        assert!(AsymptoticLimits::isotropic(&[0.0, 0.0], &[1.0, 0.0]).is_err());
        let lim = AsymptoticLimits::isotropic(&[0.1, -0.1], &[1.0, 1.5]).unwrap();
        assert!((lim.delta_sq(0, 1) - 0.04).abs() < 1e-15);
        assert!((lim.eta(0, 1) + 0.01).abs() < 1e-15);
    }
}
