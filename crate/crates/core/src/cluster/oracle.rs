//! Exhaustive minimiser of the distance-vector k-means objective, for
//! checking [`super::dv_kmeans`] on small inputs.
//!
//! The objective is evaluated here straight from its definition, without
//! the centroid tables the Lloyd engine maintains.

use crate::error::{Error, Result};
use crate::types::{LabelVector, SymmetricMatrix};

pub const ORACLE_MAX_OBJECTS: usize = 10;

fn objective<M: SymmetricMatrix + ?Sized>(m: &M, labels: &[usize]) -> f64 {
    let n = m.n();
    let mut q = 0.0;
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            let mut sum = 0.0;
            let mut count = 0usize;
            for t in 0..n {
                if labels[t] == labels[i] && t != j {
                    sum += m.get(t, j);
                    count += 1;
                }
            }
            q += (m.get(i, j) - sum / count as f64).powi(2);
        }
    }
    q
}

/// Visits every restricted growth string of length `n` with exactly `k`
/// distinct values, i.e. every partition into `k` nonempty blocks.
fn for_each_partition(n: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    fn rec(
        labels: &mut Vec<usize>,
        used: usize,
        n: usize,
        k: usize,
        visit: &mut dyn FnMut(&[usize]),
    ) {
        let pos = labels.len();
        if pos == n {
            if used == k {
                visit(labels);
            }
            return;
        }
        // Not enough positions left to open the remaining blocks.
        if k - used > n - pos {
            return;
        }
        let limit = (used + 1).min(k);
        for l in 0..limit {
            labels.push(l);
            rec(labels, used.max(l + 1), n, k, visit);
            labels.pop();
        }
    }
    rec(&mut Vec::with_capacity(n), 0, n, k, &mut visit);
}

/// Globally optimal partition into `k` clusters by enumeration.
///
/// Splitting a cluster never raises the objective, so the optimum over
/// exactly `k` blocks is also the optimum over at most `k`.
pub fn dv_kmeans_oracle<M: SymmetricMatrix + ?Sized>(m: &M, k: usize) -> Result<(LabelVector, f64)> {
    let n = m.n();
    if n > ORACLE_MAX_OBJECTS {
        return Err(Error::TooLarge {
            max: ORACLE_MAX_OBJECTS,
            got: n,
        });
    }
    if n < 3 {
        return Err(Error::TooFewObjects { needed: 3, got: n });
    }
    if k < 1 || k > n {
        return Err(Error::InvalidK { k, n });
    }
    let mut best: Option<(Vec<usize>, f64)> = None;
    for_each_partition(n, k, |labels| {
        let q = objective(m, labels);
        if best.as_ref().is_none_or(|(_, b)| q < *b) {
            best = Some((labels.to_vec(), q));
        }
    });
    let (labels, q) = best.expect("n >= k guarantees at least one partition");
    Ok((LabelVector::new(labels, k)?, q))
}
