//! The distance-vector pipeline and the method roster used by the CLI and
//! the benchmark harness.

use serde::{Deserialize, Serialize};

use super::{agglomerative, dv_kmeans, lloyd_kmeans, Dendrogram, KmeansConfig, Linkage};
use crate::error::{Error, Result};
use crate::pairwise::{distance_vector_transform, euclidean_distance_matrix, gram_matrix};
use crate::types::{DataMatrix, DissimilarityMatrix, LabelVector};

/// Which pairwise matrix feeds the distance-vector transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    /// Euclidean distances `D`.
    Distance,
    /// Inner products `S` of the centered rows.
    Gram,
}

/// The `Xi` matrix computed from `D` or `S`.
pub fn distance_vectors(x: &DataMatrix, source: Source) -> Result<DissimilarityMatrix> {
    match source {
        Source::Distance => distance_vector_transform(&euclidean_distance_matrix(x)),
        Source::Gram => distance_vector_transform(&gram_matrix(x)),
    }
}

/// `D` or `S`, then `Xi`, then agglomeration cut at `k`.
pub fn dv_hierarchical(
    x: &DataMatrix,
    source: Source,
    linkage: Linkage,
    k: usize,
) -> Result<(LabelVector, Dendrogram)> {
    if x.n_rows() < 3 {
        return Err(Error::TooFewObjects {
            needed: 3,
            got: x.n_rows(),
        });
    }
    agglomerative(&distance_vectors(x, source)?, linkage, k)
}

/// Named clustering methods. The `D?KM` / `D?W` / `D?S` names pair the
/// source matrix (`S` or `D`) with k-means, Ward or single linkage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Dskm,
    Ddkm,
    Dsw,
    Ddw,
    Dss,
    Dds,
    Kmeans,
    Ward,
    Single,
}

impl Method {
    pub const ALL: [Method; 9] = [
        Method::Ward,
        Method::Kmeans,
        Method::Single,
        Method::Dsw,
        Method::Dskm,
        Method::Ddw,
        Method::Ddkm,
        Method::Dss,
        Method::Dds,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Dskm => "dskm",
            Method::Ddkm => "ddkm",
            Method::Dsw => "dsw",
            Method::Ddw => "ddw",
            Method::Dss => "dss",
            Method::Dds => "dds",
            Method::Kmeans => "kmeans",
            Method::Ward => "ward",
            Method::Single => "single",
        }
    }

    /// Label used in benchmark tables.
    pub fn display_name(self) -> &'static str {
        match self {
            Method::Dskm => "DSKM",
            Method::Ddkm => "DDKM",
            Method::Dsw => "DSW",
            Method::Ddw => "DDW",
            Method::Dss => "DSS",
            Method::Dds => "DDS",
            Method::Kmeans => "K-means",
            Method::Ward => "Ward",
            Method::Single => "Single",
        }
    }

    pub fn is_distance_vector(self) -> bool {
        !matches!(self, Method::Kmeans | Method::Ward | Method::Single)
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        Method::ALL
            .into_iter()
            .find(|m| m.name() == lower || (lower == "k-means" && *m == Method::Kmeans))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown method {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodOutcome {
    pub labels: LabelVector,
    /// k-means objective (`Q` for the distance-vector variants, SSE for raw
    /// k-means).
    pub objective: Option<f64>,
    pub heights: Option<Vec<f64>>,
    pub converged: Option<bool>,
    /// For distance-vector k-means: whether `Q` never increased in any
    /// restart.
    pub objective_non_increasing: Option<bool>,
}

impl MethodOutcome {
    fn hierarchical((labels, tree): (LabelVector, Dendrogram)) -> Self {
        Self {
            labels,
            objective: None,
            heights: Some(tree.heights()),
            converged: None,
            objective_non_increasing: None,
        }
    }
}

/// Runs `method` with `cfg.k` clusters. Restart and seed settings only
/// affect the k-means methods.
pub fn run_method(x: &DataMatrix, method: Method, cfg: &KmeansConfig) -> Result<MethodOutcome> {
    let k = cfg.k;
    let n = x.n_rows();
    if method.is_distance_vector() && n < 3 {
        return Err(Error::TooFewObjects { needed: 3, got: n });
    }
    cfg.validate(n)?;
    let dv_km = |res: super::DvKmeansResult| MethodOutcome {
        objective: Some(res.objective),
        converged: Some(res.converged()),
        objective_non_increasing: Some(res.objective_non_increasing()),
        labels: res.labels,
        heights: None,
    };
    match method {
        Method::Dskm => dv_kmeans(&gram_matrix(x), cfg).map(dv_km),
        Method::Ddkm => dv_kmeans(&euclidean_distance_matrix(x), cfg).map(dv_km),
        Method::Dsw => dv_hierarchical(x, Source::Gram, Linkage::Ward, k).map(MethodOutcome::hierarchical),
        Method::Ddw => dv_hierarchical(x, Source::Distance, Linkage::Ward, k).map(MethodOutcome::hierarchical),
        Method::Dss => dv_hierarchical(x, Source::Gram, Linkage::Single, k).map(MethodOutcome::hierarchical),
        Method::Dds => dv_hierarchical(x, Source::Distance, Linkage::Single, k).map(MethodOutcome::hierarchical),
        Method::Ward => agglomerative(&euclidean_distance_matrix(x), Linkage::Ward, k).map(MethodOutcome::hierarchical),
        Method::Single => agglomerative(&euclidean_distance_matrix(x), Linkage::Single, k).map(MethodOutcome::hierarchical),
        Method::Kmeans => {
            let res = lloyd_kmeans(x, cfg)?;
            Ok(MethodOutcome {
                labels: res.labels,
                objective: Some(res.sse),
                heights: None,
                converged: Some(res.converged),
                objective_non_increasing: None,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_method_names() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert_eq!("DSW".parse::<Method>().unwrap(), Method::Dsw);
        assert!("mdp".parse::<Method>().is_err());
    }

    #[test]
    fn minimal_input_gives_two_clusters() {
        let x = DataMatrix::new(3, 2, vec![0.0, 0.0, 0.1, 0.0, 5.0, 5.0]).unwrap();
        for source in [Source::Distance, Source::Gram] {
            let (labels, tree) = dv_hierarchical(&x, source, Linkage::Ward, 2).unwrap();
            assert_eq!(labels.to_partition().unwrap().clusters().len(), 2);
            assert_eq!(tree.merges().len(), 2);
        }
        let x2 = DataMatrix::new(2, 1, vec![0.0, 1.0]).unwrap();
        assert!(dv_hierarchical(&x2, Source::Distance, Linkage::Ward, 2).is_err());
    }
}
