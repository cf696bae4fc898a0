//! Column preprocessing and the pairwise matrices `D`, `S` and `Xi`.
//!
//! Every kernel computes the strict upper triangle only and mirrors it, so
//! outputs are exactly symmetric. Row pairs are distributed across the rayon
//! pool, but the summation order inside a pair is fixed, so results do not
//! depend on the number of workers.
//!
//! Long coordinate sums (the `p` axis) are accumulated in fixed-size blocks
//! whose partial sums are combined with Neumaier compensation. This keeps the
//! relative error near machine precision for `p` in the millions.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::types::{DataMatrix, DissimilarityMatrix, GramMatrix, SymmetricMatrix};

const BLOCK: usize = 256;

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.carry
    }
}

fn blocked<F>(a: &[f64], b: &[f64], term: F) -> f64
where
    F: Fn(f64, f64) -> f64,
{
    let mut acc = CompensatedSum::default();
    for (ca, cb) in a.chunks(BLOCK).zip(b.chunks(BLOCK)) {
        acc.add(ca.iter().zip(cb).map(|(&x, &y)| term(x, y)).sum());
    }
    acc.total()
}

/// `sum_s (a_s - b_s)^2`
pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    blocked(a, b, |x, y| (x - y) * (x - y))
}

/// `sum_s a_s * b_s`
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    blocked(a, b, |x, y| x * y)
}

fn compensated_mean(values: impl Iterator<Item = f64>, n: usize) -> f64 {
    let mut acc = CompensatedSum::default();
    values.for_each(|v| acc.add(v));
    acc.total() / n as f64
}

fn column_means(x: &DataMatrix) -> Vec<f64> {
    (0..x.n_cols())
        .map(|s| compensated_mean(x.rows().map(|r| r[s]), x.n_rows()))
        .collect()
}

/// Subtracts each column's mean.
pub fn center_columns(x: &DataMatrix) -> DataMatrix {
    let means = column_means(x);
    let values = x
        .rows()
        .flat_map(|r| r.iter().zip(&means).map(|(v, m)| v - m))
        .collect();
    DataMatrix::new(x.n_rows(), x.n_cols(), values).expect("centering preserves shape")
}

/// Scales each column to zero mean and unit variance, using the `N - 1`
/// variance divisor.
///
/// A column whose standard deviation is negligible relative to its largest
/// magnitude is reported as [`Error::ConstantColumn`].
pub fn standardize_columns(x: &DataMatrix) -> Result<DataMatrix> {
    let n = x.n_rows();
    let means = column_means(x);
    let mut scales = Vec::with_capacity(x.n_cols());
    for (s, &mean) in means.iter().enumerate() {
        let var = compensated_mean(x.rows().map(|r| (r[s] - mean).powi(2)), n - 1);
        let sd = var.sqrt();
        let max_abs = x.rows().map(|r| r[s].abs()).fold(0.0, f64::max);
        if sd == 0.0 || sd <= 1e-12 * max_abs {
            return Err(Error::ConstantColumn(s));
        }
        scales.push(sd);
    }
    let values = x
        .rows()
        .flat_map(|r| {
            r.iter()
                .zip(&means)
                .zip(&scales)
                .map(|((v, m), sd)| (v - m) / sd)
        })
        .collect();
    DataMatrix::new(n, x.n_cols(), values)
}

fn upper_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect()
}

fn par_condensed<F>(n: usize, entry: F) -> Vec<f64>
where
    F: Fn(usize, usize) -> f64 + Sync,
{
    upper_pairs(n)
        .into_par_iter()
        .map(|(i, j)| entry(i, j))
        .collect()
}

/// Euclidean distances between rows.
pub fn euclidean_distance_matrix(x: &DataMatrix) -> DissimilarityMatrix {
    let upper = par_condensed(x.n_rows(), |i, j| squared_distance(x.row(i), x.row(j)).sqrt());
    DissimilarityMatrix::from_condensed(x.n_rows(), &upper)
        .expect("distances of finite rows are finite and nonnegative")
}

/// Inner products of the column-centered rows.
pub fn gram_matrix(x: &DataMatrix) -> GramMatrix {
    let xc = center_columns(x);
    let n = xc.n_rows();
    let upper = par_condensed(n, |i, j| dot(xc.row(i), xc.row(j)));
    let diag: Vec<f64> = (0..n).map(|i| dot(xc.row(i), xc.row(i))).collect();
    let mut it = upper.into_iter();
    GramMatrix::from_upper(n, |_, _| it.next().unwrap_or(f64::NAN), |i| diag[i])
        .expect("inner products of finite rows are finite")
}

/// The distance-vector matrix: entry `(i, j)` is the Euclidean distance
/// between rows `i` and `j` of `m` after dropping coordinates `i` and `j`.
///
/// Diagonal entries of `m` are never read, so `D` and `S` share this path.
pub fn distance_vector_transform<M: SymmetricMatrix + ?Sized>(
    m: &M,
) -> Result<DissimilarityMatrix> {
    let n = m.n();
    if n < 3 {
        return Err(Error::TooFewObjects { needed: 3, got: n });
    }
    let upper = par_condensed(n, |i, j| {
        let (ri, rj) = (m.row(i), m.row(j));
        let mut acc = 0.0;
        for t in 0..n {
            if t != i && t != j {
                let d = ri[t] - rj[t];
                acc += d * d;
            }
        }
        acc.sqrt()
    });
    DissimilarityMatrix::from_condensed(n, &upper)
}
