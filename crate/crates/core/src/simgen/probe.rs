//! Empirical check of the large-`p` limits of norms, distances and inner
//! products for two isotropic Gaussian clusters.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::substream;
use crate::error::{Error, Result};
use crate::pairwise::{dot, squared_distance};
use crate::types::AsymptoticLimits;

/// Cluster `k` is `N_p(mean_k * 1, var_k * I)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoClusterFamily {
    pub mean1: f64,
    pub var1: f64,
    pub mean2: f64,
    pub var2: f64,
}

impl TwoClusterFamily {
    pub const STANDARD: Self = Self {
        mean1: 0.0,
        var1: 1.0,
        mean2: 0.0,
        var2: 1.0,
    };

    pub fn limits(&self) -> Result<AsymptoticLimits> {
        AsymptoticLimits::isotropic(&[self.mean1, self.mean2], &[self.var1, self.var2])
    }
}

impl std::str::FromStr for TwoClusterFamily {
    type Err = Error;

    /// `standard`, `example2[:c]`, `example3`, or `m1:v1,m2:v2`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("unrecognised family {s:?}"));
        let s = s.trim();
        match s {
            "standard" => return Ok(Self::STANDARD),
            "example3" => {
                return Ok(Self {
                    mean1: 0.1,
                    var1: 1.0,
                    mean2: -0.1,
                    var2: 1.5,
                })
            }
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("example2") {
            let c = match rest.strip_prefix(':') {
                Some(c) => c.parse().map_err(|_| bad())?,
                None if rest.is_empty() => 2.0,
                None => return Err(bad()),
            };
            return Ok(Self {
                var2: c,
                ..Self::STANDARD
            });
        }
        let nums: Vec<f64> = s
            .split([',', ':'])
            .map(|t| t.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        match nums[..] {
            [mean1, var1, mean2, var2] if var1 > 0.0 && var2 > 0.0 => Ok(Self {
                mean1,
                var1,
                mean2,
                var2,
            }),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    /// `|X_1| / sqrt(p)`, limit `sqrt(mu_1^2 + sigma_1^2)`.
    Norm,
    /// `|U_1 - U_2| / sqrt(p)` within cluster 1, limit `sqrt(2) sigma_1`.
    WithinDistance,
    /// `<U_1, U_2> / p` within cluster 1, limit `mu_1^2`.
    WithinInner,
    /// `|X_1 - X_2| / sqrt(p)`, limit `sqrt(delta^2 + sigma_1^2 + sigma_2^2)`.
    BetweenDistance,
    /// `<X_1, X_2> / p`, limit `eta_12`.
    BetweenInner,
}

impl Statistic {
    pub const ALL: [Statistic; 5] = [
        Statistic::Norm,
        Statistic::WithinDistance,
        Statistic::WithinInner,
        Statistic::BetweenDistance,
        Statistic::BetweenInner,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Statistic::Norm => "norm",
            Statistic::WithinDistance => "within_distance",
            Statistic::WithinInner => "within_inner",
            Statistic::BetweenDistance => "between_distance",
            Statistic::BetweenInner => "between_inner",
        }
    }

    fn limit(self, lim: &AsymptoticLimits) -> f64 {
        let (s1, s2) = (lim.sigma_sq(0), lim.sigma_sq(1));
        match self {
            Statistic::Norm => (lim.mu_sq(0) + s1).sqrt(),
            Statistic::WithinDistance => (2.0 * s1).sqrt(),
            Statistic::WithinInner => lim.mu_sq(0),
            Statistic::BetweenDistance => (lim.delta_sq(0, 1) + s1 + s2).sqrt(),
            Statistic::BetweenInner => lim.eta(0, 1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeRow {
    pub p: usize,
    pub statistic: Statistic,
    pub empirical: f64,
    /// Standard error of `empirical` over the replicates (0 for one replicate).
    pub std_error: f64,
    pub limit: f64,
    /// `|empirical - limit| / |limit|`, or the absolute error when the limit
    /// is 0.
    pub rel_error: f64,
}

fn draw<R: Rng>(rng: &mut R, p: usize, mean: f64, var: f64) -> Vec<f64> {
    let sd = var.sqrt();
    (0..p)
        .map(|_| mean + sd * rng.sample::<f64, _>(StandardNormal))
        .collect()
}

/// For each `p`, averages the five statistics over `reps` independent
/// draws of `U_1, U_2` from cluster 1 and `X_2` from cluster 2 (`X_1` is
/// `U_1`). Replicate `r` at grid position `g` uses stream `(g << 32) | r`.
pub fn prop1_probe(
    family: &TwoClusterFamily,
    p_grid: &[usize],
    reps: usize,
    seed: u64,
) -> Result<Vec<ProbeRow>> {
    if p_grid.is_empty() {
        return Err(Error::InvalidParameter("empty dimension grid".into()));
    }
    if p_grid.contains(&0) {
        return Err(Error::InvalidParameter("dimensions must be >= 1".into()));
    }
    if reps == 0 {
        return Err(Error::InvalidParameter("reps must be >= 1".into()));
    }
    let lim = family.limits()?;
    let mut rows = Vec::with_capacity(p_grid.len() * Statistic::ALL.len());
    for (g, &p) in p_grid.iter().enumerate() {
        let samples: Vec<[f64; 5]> = (0..reps)
            .into_par_iter()
            .map(|r| {
                let mut rng = substream(seed, ((g as u64) << 32) | r as u64);
                let u1 = draw(&mut rng, p, family.mean1, family.var1);
                let u2 = draw(&mut rng, p, family.mean1, family.var1);
                let v = draw(&mut rng, p, family.mean2, family.var2);
                let (pf, root) = (p as f64, (p as f64).sqrt());
                [
                    dot(&u1, &u1).sqrt() / root,
                    squared_distance(&u1, &u2).sqrt() / root,
                    dot(&u1, &u2) / pf,
                    squared_distance(&u1, &v).sqrt() / root,
                    dot(&u1, &v) / pf,
                ]
            })
            .collect();
        for (s, stat) in Statistic::ALL.into_iter().enumerate() {
            let values: Vec<f64> = samples.iter().map(|x| x[s]).collect();
            let n = values.len() as f64;
            let mean = values.iter().sum::<f64>() / n;
            let std_error = if values.len() > 1 {
                let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
                (var / n).sqrt()
            } else {
                0.0
            };
            let limit = stat.limit(&lim);
            let abs = (mean - limit).abs();
            rows.push(ProbeRow {
                p,
                statistic: stat,
                empirical: mean,
                std_error,
                limit,
                rel_error: if limit == 0.0 { abs } else { abs / limit.abs() },
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_families() {
        assert_eq!("standard".parse::<TwoClusterFamily>().unwrap(), TwoClusterFamily::STANDARD);
        assert_eq!("example2".parse::<TwoClusterFamily>().unwrap().var2, 2.0);
        assert_eq!("example2:3.5".parse::<TwoClusterFamily>().unwrap().var2, 3.5);
        let f: TwoClusterFamily = "0.1:1,-0.1:1.5".parse().unwrap();
        assert_eq!(f, "example3".parse().unwrap());
        assert!("0:1,0".parse::<TwoClusterFamily>().is_err());
        assert!("0:0,0:1".parse::<TwoClusterFamily>().is_err());
    }

    #[test]
    fn standard_limits() {
        let lim = TwoClusterFamily::STANDARD.limits().unwrap();
        assert_eq!(Statistic::Norm.limit(&lim), 1.0);
        assert_eq!(Statistic::WithinDistance.limit(&lim), 2f64.sqrt());
        assert_eq!(Statistic::WithinInner.limit(&lim), 0.0);
    }

    #[test]
    fn rejects_bad_grid() {
        let f = TwoClusterFamily::STANDARD;
        assert!(prop1_probe(&f, &[], 3, 0).is_err());
        assert!(prop1_probe(&f, &[10], 0, 0).is_err());
        let rows = prop1_probe(&f, &[10], 1, 0).unwrap();
        assert_eq!(rows.len(), 5);
        assert!(rows.iter().all(|r| r.std_error == 0.0));
    }
}
