use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::types::DataMatrix;

/// Lower Cholesky factor of the `block x block` matrix with `diag` on the
/// diagonal and `rho^(|s-t|/3)` off it.
#[derive(Debug, Clone)]
pub(crate) struct BlockFactor {
    block: usize,
    lower: Vec<f64>,
}

impl BlockFactor {
    pub(crate) fn new(rho: f64, diag: f64, block: usize) -> Result<Self> {
        let sigma = DMatrix::from_fn(block, block, |s, t| {
            if s == t {
                diag
            } else {
                rho.powf(s.abs_diff(t) as f64 / 3.0)
            }
        });
        let chol = sigma.cholesky().ok_or(Error::NotPositiveDefinite)?;
        let l = chol.l();
        let mut lower = vec![0.0; block * block];
        for s in 0..block {
            for t in 0..=s {
                lower[s * block + t] = l[(s, t)];
            }
        }
        Ok(Self { block, lower })
    }

    /// Replaces the first `block` entries of `z` with `L z`.
    pub(crate) fn apply(&self, z: &mut [f64]) {
        let b = self.block;
        // Row s of L only reads z[..=s], so filling from the bottom is in place.
        for s in (0..b).rev() {
            let row = &self.lower[s * b..s * b + s + 1];
            z[s] = row.iter().zip(&z[..=s]).map(|(l, v)| l * v).sum();
        }
    }
}

/// Draws `n` rows from `N_p(0, Sigma)` where `Sigma` has the autoregressive
/// block (diagonal `diag`, off-diagonal `rho^(|s-t|/3)`) on its first `block`
/// coordinates and the identity elsewhere.
pub fn sample_block_ar_gaussian<R: Rng + ?Sized>(
    rho: f64,
    diag: f64,
    block: usize,
    p: usize,
    n: usize,
    rng: &mut R,
) -> Result<DataMatrix> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::InvalidParameter(format!("rho={rho} must lie in (0, 1)")));
    }
    if !(diag >= 1.0 && diag.is_finite()) {
        return Err(Error::InvalidParameter(format!("diag={diag} must be >= 1")));
    }
    if block == 0 || block > p {
        return Err(Error::InvalidParameter(format!(
            "block={block} must lie in 1..={p}"
        )));
    }
    let factor = BlockFactor::new(rho, diag, block)?;
    let mut values = Vec::with_capacity(n * p);
    let mut z = vec![0.0; p];
    for _ in 0..n {
        z.iter_mut().for_each(|v| *v = rng.sample(StandardNormal));
        factor.apply(&mut z);
        values.extend_from_slice(&z);
    }
    DataMatrix::new(n, p, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn factor_reproduces_covariance() {
        let f = BlockFactor::new(0.5, 2.0, 6).unwrap();
        for s in 0..6 {
            for t in 0..6 {
                let v: f64 = (0..6).map(|u| f.lower[s * 6 + u] * f.lower[t * 6 + u]).sum();
                let expected = if s == t { 2.0 } else { 0.5f64.powf(s.abs_diff(t) as f64 / 3.0) };
                assert!((v - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn in_place_apply_matches_product() {
        let f = BlockFactor::new(0.3, 1.0, 4).unwrap();
        let z0 = [0.5, -1.0, 2.0, 0.25, 9.0];
        let mut z = z0;
        f.apply(&mut z);
        for s in 0..4 {
            let expected: f64 = (0..4).map(|t| f.lower[s * 4 + t] * z0[t]).sum();
            assert!((z[s] - expected).abs() < 1e-14);
        }
        assert_eq!(z[4], 9.0);
    }

    #[test]
    fn parameter_checks() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(sample_block_ar_gaussian(0.0, 1.0, 3, 5, 2, &mut rng).is_err());
        assert!(sample_block_ar_gaussian(1.0, 1.0, 3, 5, 2, &mut rng).is_err());
        assert!(sample_block_ar_gaussian(0.5, 0.5, 3, 5, 2, &mut rng).is_err());
        assert!(sample_block_ar_gaussian(0.5, 1.0, 6, 5, 2, &mut rng).is_err());
    }

    #[test]
    fn not_positive_definite_is_reported() {
        assert!(matches!(BlockFactor::new(0.999, -1.0, 3), Err(Error::NotPositiveDefinite)));
    }
}
