//! Agglomerative clustering with the Lance-Williams recurrence.
//!
//! The nearest active pair is found by a full scan, so a call costs
//! `O(N^3)`. Ties go to the pair that comes first in row-major order of the
//! active slots, and the merged cluster takes the lower slot. Node ids follow
//! the usual convention: leaves are `0..N`, the cluster formed by merge `s`
//! is `N + s`.
//!
//! Ward's method runs the recurrence on squared dissimilarities and reports
//! the square root as the merge height (the "ward.D2" convention). The input
//! does not need to be Euclidean-embeddable for this to be well defined.
//! [`Linkage::WardD`] applies the same recurrence to the unsquared input
//! ("ward.D"), which is what older R code gets from `hclust(method = "ward")`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{DissimilarityMatrix, LabelVector, SymmetricMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Linkage {
    Ward,
    /// The Ward recurrence on unsquared dissimilarities.
    #[serde(rename = "ward.d")]
    WardD,
    Single,
    Complete,
    Average,
}

impl std::str::FromStr for Linkage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ward" | "ward.d2" => Ok(Self::Ward),
            "ward.d" => Ok(Self::WardD),
            "single" => Ok(Self::Single),
            "complete" => Ok(Self::Complete),
            "average" => Ok(Self::Average),
            other => Err(Error::InvalidParameter(format!("unknown linkage {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dendrogram {
    n: usize,
    merges: Vec<Merge>,
}

impl Dendrogram {
    pub fn n_objects(&self) -> usize {
        self.n
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    pub fn heights(&self) -> Vec<f64> {
        self.merges.iter().map(|m| m.height).collect()
    }

    /// Partition into `k` clusters obtained by applying the first `N - k`
    /// merges. Clusters are numbered by their smallest member.
    pub fn cut(&self, k: usize) -> Result<LabelVector> {
        if k < 1 || k > self.n {
            return Err(Error::InvalidK { k, n: self.n });
        }
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        // Any leaf of a node stands in for it in the union-find.
        let mut witness: Vec<usize> = (0..self.n).collect();
        for m in &self.merges[..self.n - k] {
            let (a, b) = (witness[m.left], witness[m.right]);
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra.max(rb)] = ra.min(rb);
            witness.push(a);
        }
        let mut roots: Vec<usize> = (0..self.n).map(|i| find(&mut parent, i)).collect();
        let mut ids = vec![usize::MAX; self.n];
        let mut next = 0;
        for r in roots.iter_mut() {
            if ids[*r] == usize::MAX {
                ids[*r] = next;
                next += 1;
            }
            *r = ids[*r];
        }
        LabelVector::new(roots, k)
    }
}

/// Agglomerates `d` and cuts the tree at `k` clusters.
pub fn agglomerative(
    d: &DissimilarityMatrix,
    linkage: Linkage,
    k: usize,
) -> Result<(LabelVector, Dendrogram)> {
    let n = d.n();
    if n < 2 {
        return Err(Error::TooFewObjects { needed: 2, got: n });
    }
    if k < 1 || k > n {
        return Err(Error::InvalidK { k, n });
    }
    let dendrogram = build(d, linkage);
    let labels = dendrogram.cut(k)?;
    Ok((labels, dendrogram))
}

fn build(d: &DissimilarityMatrix, linkage: Linkage) -> Dendrogram {
    let n = d.n();
    let mut w: Vec<f64> = d.as_slice().to_vec();
    if linkage == Linkage::Ward {
        w.iter_mut().for_each(|v| *v *= *v);
    }
    let mut active = vec![true; n];
    let mut size = vec![1usize; n];
    let mut node: Vec<usize> = (0..n).collect();
    let mut merges = Vec::with_capacity(n - 1);

    for step in 0..n - 1 {
        let mut best = (usize::MAX, usize::MAX, f64::INFINITY);
        for i in (0..n).filter(|&i| active[i]) {
            for j in ((i + 1)..n).filter(|&j| active[j]) {
                let v = w[i * n + j];
                if v < best.2 {
                    best = (i, j, v);
                }
            }
        }
        let (i, j, dij) = best;
        let (ni, nj) = (size[i] as f64, size[j] as f64);
        for t in (0..n).filter(|&t| active[t] && t != i && t != j) {
            let (dit, djt) = (w[i * n + t], w[j * n + t]);
            let nt = size[t] as f64;
            // (i, j) is the closest active pair, so every linkage here
            // satisfies d(i+j, t) >= d(i, j); the max only absorbs rounding.
            let updated = match linkage {
                Linkage::Single => dit.min(djt),
                Linkage::Complete => dit.max(djt),
                Linkage::Average => ((ni * dit + nj * djt) / (ni + nj)).max(dij),
                Linkage::Ward | Linkage::WardD => {
                    (((ni + nt) * dit + (nj + nt) * djt - nt * dij) / (ni + nj + nt)).max(dij)
                }
            };
            w[i * n + t] = updated;
            w[t * n + i] = updated;
        }
        active[j] = false;
        let height = if linkage == Linkage::Ward { dij.sqrt() } else { dij };
        size[i] += size[j];
        merges.push(Merge {
            left: node[i],
            right: node[j],
            height,
            size: size[i],
        });
        node[i] = n + step;
    }
    Dendrogram { n, merges }
}
