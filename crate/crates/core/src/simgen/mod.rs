//! Reproducible synthetic data for high-dimension, low-sample-size studies.
//!
//! [`gen_setting`] builds the three-cluster mixtures used by the benchmark
//! harness. Cluster centres are `0`, `(mu, .., mu, 0, .., 0)` and its
//! negation, where the first [`INFORMATIVE`] coordinates carry the signal.
//! The four settings differ in their covariances:
//!
//! | setting | cluster 1 | clusters 2, 3 |
//! |---|---|---|
//! | I | `I` | `I` |
//! | II | AR block `rho_1`, then `I` | AR block `rho_k`, then `I` |
//! | III | `sigma^2 I` | `I` |
//! | IV | AR block `rho_1` with diagonal `sigma^2`, then `I` | AR block `rho_k`, then `I` |
//!
//! The AR block has entries `rho^(|s-t|/3)`; each `rho_k` is drawn from
//! `U[0.1, 0.9]` once per dataset and reported in
//! [`GeneratedDataset::realized_rho`].
//!
//! Generators draw from ChaCha streams keyed by `(seed, stream)`, so any
//! replicate can be produced without generating the ones before it.

mod block;
mod probe;

pub use block::sample_block_ar_gaussian;
pub use probe::{prop1_probe, ProbeRow, Statistic, TwoClusterFamily};

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use block::BlockFactor;

use crate::error::{Error, Result};
use crate::types::{AsymptoticLimits, DataMatrix, LabelVector};

/// Number of coordinates that carry the mean shift and the AR block.
pub const INFORMATIVE: usize = 150;

/// Datasets with an empty true cluster are redrawn up to this many times.
pub const MAX_ATTEMPTS: u64 = 1 << 16;

/// Generator for `stream` under `seed`.
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Setting {
    I,
    II,
    III,
    IV,
}

impl Setting {
    /// Settings III and IV vary the first cluster's variance instead of `mu`.
    pub fn varies_sigma(self) -> bool {
        matches!(self, Setting::III | Setting::IV)
    }

    fn correlated(self) -> bool {
        matches!(self, Setting::II | Setting::IV)
    }
}

impl std::str::FromStr for Setting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "I" | "1" => Ok(Setting::I),
            "II" | "2" => Ok(Setting::II),
            "III" | "3" => Ok(Setting::III),
            "IV" | "4" => Ok(Setting::IV),
            other => Err(Error::InvalidParameter(format!("unknown setting {other:?}"))),
        }
    }
}

impl std::fmt::Display for Setting {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Setting::I => "I",
            Setting::II => "II",
            Setting::III => "III",
            Setting::IV => "IV",
        })
    }
}

pub const PI_SKEW: [f64; 3] = [0.7, 0.2, 0.1];
pub const PI_BALANCED: [f64; 3] = [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0];

/// Parameters of one synthetic dataset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SettingSpec {
    pub setting: Setting,
    pub p: usize,
    /// Mean shift on the informative coordinates. Defaults to `1.0` for
    /// Settings I/II and is fixed at `0.5` for III/IV.
    pub mu: f64,
    /// Variance of the first cluster (Settings III/IV only).
    pub sigma_sq: Option<f64>,
    pub pi: [f64; 3],
    pub n: usize,
    pub seed: u64,
}

impl SettingSpec {
    pub fn new(setting: Setting, p: usize) -> Self {
        let (mu, sigma_sq) = if setting.varies_sigma() {
            (0.5, Some(2.5))
        } else {
            (1.0, None)
        };
        Self {
            setting,
            p,
            mu,
            sigma_sq,
            pi: PI_BALANCED,
            n: 100,
            seed: 0,
        }
    }

    pub fn with_mu(mut self, mu: f64) -> Self {
        self.mu = mu;
        self
    }

    pub fn with_sigma_sq(mut self, sigma_sq: f64) -> Self {
        self.sigma_sq = Some(sigma_sq);
        self
    }

    pub fn with_pi(mut self, pi: [f64; 3]) -> Self {
        self.pi = pi;
        self
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.p < INFORMATIVE {
            return Err(Error::InvalidParameter(format!(
                "p={} is below the {INFORMATIVE} informative coordinates",
                self.p
            )));
        }
        if self.n < 3 {
            return Err(Error::InvalidParameter(format!("n={} must be >= 3", self.n)));
        }
        if self.pi.iter().any(|&v| !(v > 0.0)) || (self.pi.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "pi={:?} must be positive and sum to 1",
                self.pi
            )));
        }
        if !self.mu.is_finite() {
            return Err(Error::InvalidParameter("mu must be finite".into()));
        }
        if self.setting.varies_sigma() {
            match self.sigma_sq {
                Some(s) if s > 0.0 && s.is_finite() => {}
                _ => {
                    return Err(Error::InvalidParameter(
                        "sigma_sq must be > 0 for settings III and IV".into(),
                    ))
                }
            }
        }
        Ok(())
    }
}

/// A synthetic dataset with its ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedDataset {
    pub x: DataMatrix,
    pub truth: LabelVector,
    /// The AR parameters `rho_1..rho_3` (Settings II and IV).
    pub realized_rho: Option<Vec<f64>>,
    /// Draws discarded because a true cluster came out empty.
    pub rejections: u64,
}

enum Noise {
    Scaled(f64),
    Block(BlockFactor),
}

impl Noise {
    fn fill<R: Rng>(&self, z: &mut [f64], rng: &mut R) {
        z.iter_mut().for_each(|v| *v = rng.sample(StandardNormal));
        match self {
            Noise::Scaled(sd) => {
                if *sd != 1.0 {
                    z.iter_mut().for_each(|v| *v *= sd);
                }
            }
            Noise::Block(f) => f.apply(z),
        }
    }
}

/// Replicate 0 of `spec`.
pub fn gen_setting(spec: &SettingSpec) -> Result<GeneratedDataset> {
    gen_setting_replicate(spec, 0)
}

/// Replicate `replicate` of `spec`, drawn from its own substream of
/// `spec.seed`.
pub fn gen_setting_replicate(spec: &SettingSpec, replicate: u64) -> Result<GeneratedDataset> {
    spec.validate()?;
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = substream(spec.seed, (replicate << 16) | attempt);
        if let Some((x, truth, rho)) = try_generate(spec, &mut rng)? {
            return Ok(GeneratedDataset {
                x,
                truth,
                realized_rho: rho,
                rejections: attempt,
            });
        }
    }
    Err(Error::InvalidParameter(
        "could not draw a dataset with three nonempty clusters".into(),
    ))
}

type Draw = (DataMatrix, LabelVector, Option<Vec<f64>>);

fn try_generate<R: Rng>(spec: &SettingSpec, rng: &mut R) -> Result<Option<Draw>> {
    let rho: Option<Vec<f64>> = spec
        .setting
        .correlated()
        .then(|| (0..3).map(|_| rng.random_range(0.1..=0.9)).collect());
    let chooser = WeightedIndex::new(spec.pi)
        .map_err(|e| Error::InvalidParameter(format!("pi: {e}")))?;
    let labels: Vec<usize> = (0..spec.n).map(|_| chooser.sample(rng)).collect();
    let mut counts = [0usize; 3];
    labels.iter().for_each(|&l| counts[l] += 1);
    if counts.contains(&0) {
        return Ok(None);
    }

    let sigma_sq = spec.sigma_sq.unwrap_or(1.0);
    let noise: Vec<Noise> = (0..3)
        .map(|k| -> Result<Noise> {
            Ok(match (spec.setting, &rho) {
                (Setting::I, _) => Noise::Scaled(1.0),
                (Setting::III, _) if k == 0 => Noise::Scaled(sigma_sq.sqrt()),
                (Setting::III, _) => Noise::Scaled(1.0),
                (Setting::II, Some(r)) => Noise::Block(BlockFactor::new(r[k], 1.0, INFORMATIVE)?),
                (Setting::IV, Some(r)) => {
                    let diag = if k == 0 { sigma_sq } else { 1.0 };
                    Noise::Block(BlockFactor::new(r[k], diag, INFORMATIVE)?)
                }
                _ => unreachable!("correlated settings always draw rho"),
            })
        })
        .collect::<Result<_>>()?;

    let p = spec.p;
    let mut values = Vec::with_capacity(spec.n * p);
    let mut z = vec![0.0; p];
    for &k in &labels {
        noise[k].fill(&mut z, rng);
        let shift = match k {
            1 => spec.mu,
            2 => -spec.mu,
            _ => 0.0,
        };
        if shift != 0.0 {
            z[..INFORMATIVE].iter_mut().for_each(|v| *v += shift);
        }
        values.extend_from_slice(&z);
    }
    Ok(Some((
        DataMatrix::new(spec.n, p, values)?,
        LabelVector::new(labels, 3)?,
        rho,
    )))
}

fn isotropic_rows<R: Rng>(rng: &mut R, n: usize, p: usize, mean: f64, var: f64, out: &mut Vec<f64>) {
    let sd = var.sqrt();
    for _ in 0..n * p {
        let z: f64 = rng.sample(StandardNormal);
        out.push(mean + sd * z);
    }
}

/// `n_per` rows from `N_p(0, I)` followed by `n_per` rows from
/// `N_p(0, c I)`. The clusters differ only in scale.
pub fn gen_example2(p: usize, c: f64, n_per: usize, seed: u64) -> Result<GeneratedDataset> {
    if !(c > 0.0 && c.is_finite()) || c == 1.0 {
        return Err(Error::InvalidParameter(format!(
            "c={c} must be positive and different from 1"
        )));
    }
    if n_per < 2 || p < 1 {
        return Err(Error::InvalidParameter("need n_per >= 2 and p >= 1".into()));
    }
    let mut rng = substream(seed, 0);
    let mut values = Vec::with_capacity(2 * n_per * p);
    isotropic_rows(&mut rng, n_per, p, 0.0, 1.0, &mut values);
    isotropic_rows(&mut rng, n_per, p, 0.0, c, &mut values);
    two_block_dataset(p, n_per, values)
}

/// Five rows from `N_p(0.1 * 1, I)` followed by five from
/// `N_p(-0.1 * 1, 1.5 I)`.
pub fn gen_example3(p: usize, seed: u64) -> Result<GeneratedDataset> {
    if p < 1 {
        return Err(Error::InvalidParameter("p must be >= 1".into()));
    }
    let mut rng = substream(seed, 0);
    let mut values = Vec::with_capacity(10 * p);
    isotropic_rows(&mut rng, 5, p, 0.1, 1.0, &mut values);
    isotropic_rows(&mut rng, 5, p, -0.1, 1.5, &mut values);
    two_block_dataset(p, 5, values)
}

fn two_block_dataset(p: usize, n_per: usize, values: Vec<f64>) -> Result<GeneratedDataset> {
    let truth = (0..2 * n_per).map(|i| usize::from(i >= n_per)).collect();
    Ok(GeneratedDataset {
        x: DataMatrix::new(2 * n_per, p, values)?,
        truth: LabelVector::new(truth, 2)?,
        realized_rho: None,
        rejections: 0,
    })
}

pub fn example2_limits(c: f64) -> Result<AsymptoticLimits> {
    AsymptoticLimits::isotropic(&[0.0, 0.0], &[1.0, c])
}

pub fn example3_limits() -> Result<AsymptoticLimits> {
    AsymptoticLimits::isotropic(&[0.1, -0.1], &[1.0, 1.5])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_validation() {
        assert!(SettingSpec::new(Setting::I, 100).validate().is_err());
        assert!(SettingSpec::new(Setting::I, 1000).with_pi([0.5, 0.5, 0.0]).validate().is_err());
        assert!(SettingSpec::new(Setting::I, 1000).with_pi([0.5, 0.3, 0.1]).validate().is_err());
        let mut s = SettingSpec::new(Setting::III, 1000);
        s.sigma_sq = None;
        assert!(s.validate().is_err());
        assert!(SettingSpec::new(Setting::IV, 1000).with_sigma_sq(0.0).validate().is_err());
        assert!(SettingSpec::new(Setting::II, 150).validate().is_ok());
    }

    #[test]
    fn realized_rho_only_for_correlated_settings() {
        for setting in [Setting::I, Setting::II, Setting::III, Setting::IV] {
            let d = gen_setting(&SettingSpec::new(setting, 200).with_n(20).with_seed(3)).unwrap();
            match d.realized_rho {
                Some(r) => {
                    assert!(setting.correlated());
                    assert_eq!(r.len(), 3);
                    assert!(r.iter().all(|v| (0.1..=0.9).contains(v)));
                }
                None => assert!(!setting.correlated()),
            }
            assert_eq!(d.truth.len(), 20);
            assert_eq!(d.x.n_cols(), 200);
            assert!(d.truth.counts().iter().all(|&c| c > 0));
        }
    }

    #[test]
    fn small_samples_are_redrawn() {
        let spec = SettingSpec::new(Setting::I, 150).with_n(3).with_pi(PI_SKEW).with_seed(1);
        let d = gen_setting(&spec).unwrap();
        assert_eq!(d.truth.counts(), vec![1, 1, 1]);
        assert!(d.rejections > 0);
    }

    #[test]
    fn example_shapes() {
        let d = gen_example2(50, 2.0, 10, 0).unwrap();
        assert_eq!(d.truth.to_one_based(), [vec![1; 10], vec![2; 10]].concat());
        assert_eq!(d.x.n_rows(), 20);
        assert!(gen_example2(50, 1.0, 10, 0).is_err());
        assert!(gen_example2(50, -1.0, 10, 0).is_err());
        assert!(gen_example2(50, 2.0, 1, 0).is_err());
        let d = gen_example3(100, 0).unwrap();
        assert_eq!(d.truth.to_one_based(), vec![1, 1, 1, 1, 1, 2, 2, 2, 2, 2]);
    }

    #[test]
    fn example3_limits_from_means() {
        let lim = example3_limits().unwrap();
        assert!((lim.mu_sq(0) - 0.01).abs() < 1e-15);
        assert!((lim.mu_sq(1) - 0.01).abs() < 1e-15);
        assert!((lim.delta_sq(0, 1) - 0.04).abs() < 1e-15);
        assert_eq!((lim.sigma_sq(0), lim.sigma_sq(1)), (1.0, 1.5));
    }
}
