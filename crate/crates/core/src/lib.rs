//! Distance-vector clustering for high-dimension, low-sample-size data.
//!
//! When the dimension `p` is large and the sample size `N` is small,
//! pairwise distances concentrate: points from the same cluster are not
//! necessarily closer to each other than to points in other clusters. The
//! *values* of the distances still carry the cluster structure, though.
//! Object `i` is described by its distance vector (row `i` of the distance
//! matrix `D` or of the inner-product matrix `S`), and objects are compared
//! through
//!
//! ```text
//! xi_ij = sqrt( sum_{t != i, j} (m_it - m_jt)^2 )
//! ```
//!
//! which is then handed to an ordinary clustering method.
//!
//! ```
//! use dvclust::cluster::{dv_hierarchical, Linkage, Source};
//! use dvclust::evaluation::adjusted_rand_index;
//! use dvclust::simgen::gen_example3;
//!
//! let data = gen_example3(2000, 7).unwrap();
//! let (labels, _tree) = dv_hierarchical(&data.x, Source::Distance, Linkage::Ward, 2).unwrap();
//! assert_eq!(adjusted_rand_index(&labels, &data.truth).unwrap(), 1.0);
//! ```
//!
//! The companion guide in `book/` walks through the ideas chapter by
//! chapter; its code listings are compiled as doctests of this crate.

pub mod cli;
pub mod cluster;
mod error;
pub mod evaluation;
pub mod heatmap;
pub mod io;
pub mod pairwise;
pub mod simgen;
pub mod types;

pub use error::{Error, Result};
pub use types::{
    labels_to_partition, partition_to_labels, AsymptoticLimits, ClusterPartition, DataMatrix,
    DissimilarityMatrix, GramMatrix, LabelVector, SymmetricMatrix,
};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/distance-vectors.md")]
    mod distance_vectors {}
    #[doc = include_str!("../../../book/src/kmeans.md")]
    mod kmeans {}
    #[doc = include_str!("../../../book/src/hierarchical.md")]
    mod hierarchical {}
    #[doc = include_str!("../../../book/src/evaluation.md")]
    mod evaluation {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
