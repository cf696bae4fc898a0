//! Reference implementations used as test oracles. Each one is written from
//! the textbook definition and shares no code with the library.

#![allow(dead_code)]

use dvclust::{DataMatrix, DissimilarityMatrix, SymmetricMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Edge weights of a minimum spanning tree (Prim's algorithm), ascending.
pub fn mst_weights(d: &DissimilarityMatrix) -> Vec<f64> {
    let n = d.n();
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    best[0] = 0.0;
    let mut weights = Vec::with_capacity(n - 1);
    for step in 0..n {
        let u = (0..n)
            .filter(|&v| !in_tree[v])
            .min_by(|&a, &b| best[a].total_cmp(&best[b]))
            .unwrap();
        in_tree[u] = true;
        if step > 0 {
            weights.push(best[u]);
        }
        for v in 0..n {
            if !in_tree[v] && d.get(u, v) < best[v] {
                best[v] = d.get(u, v);
            }
        }
    }
    weights.sort_by(f64::total_cmp);
    weights
}

/// Adjusted Rand index from a direct scan over all object pairs.
pub fn ari_pair_counting(a: &[usize], b: &[usize]) -> f64 {
    let n = a.len();
    let (mut both, mut in_a, mut in_b) = (0.0, 0.0, 0.0);
    for i in 0..n {
        for j in i + 1..n {
            let sa = a[i] == a[j];
            let sb = b[i] == b[j];
            in_a += f64::from(u8::from(sa));
            in_b += f64::from(u8::from(sb));
            both += f64::from(u8::from(sa && sb));
        }
    }
    let total = (n * (n - 1) / 2) as f64;
    let expected = in_a * in_b / total;
    let max = (in_a + in_b) / 2.0;
    if max == expected {
        return 1.0;
    }
    (both - expected) / (max - expected)
}

/// All labelings of `n` objects into two nonempty groups, each once
/// (object 0 always in group 0).
pub fn two_partitions(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (1u32..(1 << (n - 1))).map(move |mask| {
        (0..n)
            .map(|i| if i == 0 { 0 } else { ((mask >> (i - 1)) & 1) as usize })
            .collect()
    })
}

/// Within-cluster sum of squares of `labels` on the rows of `x`.
pub fn sse(x: &DataMatrix, labels: &[usize]) -> f64 {
    let k = labels.iter().max().unwrap() + 1;
    let p = x.n_cols();
    let mut total = 0.0;
    for c in 0..k {
        let members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == c).collect();
        for s in 0..p {
            let mean = members.iter().map(|&i| x.get(i, s)).sum::<f64>() / members.len() as f64;
            total += members.iter().map(|&i| (x.get(i, s) - mean).powi(2)).sum::<f64>();
        }
    }
    total
}

/// Smallest SSE over every 2-partition.
pub fn best_two_means_sse(x: &DataMatrix) -> f64 {
    two_partitions(x.n_rows())
        .map(|l| sse(x, &l))
        .fold(f64::INFINITY, f64::min)
}

/// A symmetric matrix with zero diagonal and off-diagonal entries drawn
/// uniformly from `[0, 10)`.
pub fn random_symmetric(n: usize, rng: &mut ChaCha8Rng) -> DissimilarityMatrix {
    DissimilarityMatrix::from_upper(n, |_, _| rng.random_range(0.0..10.0)).unwrap()
}

/// `n` uniform points in the unit cube of dimension `dim`.
pub fn random_points(n: usize, dim: usize, seed: u64) -> DataMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vals = (0..n * dim).map(|_| rng.random_range(0.0..1.0)).collect();
    DataMatrix::new(n, dim, vals).unwrap()
}

/// Euclidean distances computed the long way.
pub fn naive_distances(x: &DataMatrix) -> DissimilarityMatrix {
    DissimilarityMatrix::from_upper(x.n_rows(), |i, j| {
        (0..x.n_cols())
            .map(|s| (x.get(i, s) - x.get(j, s)).powi(2))
            .sum::<f64>()
            .sqrt()
    })
    .unwrap()
}
