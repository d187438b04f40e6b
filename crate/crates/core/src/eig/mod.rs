//! Unspecified eigenpairs `|Ax - lambda x| <= eps |A|` under Krylov information.
//!
//! * [`gmr_eig`]: the pair minimizing the residual over the Krylov space.
//! * [`ritz_eig`]: the best Lanczos Ritz pair, for comparison.
//! * [`lanczos_largest`] and [`power_largest`]: randomized-start estimates of `lambda_max`.
//! * [`adversary_pair`]: two matrices with equal Krylov information and far-apart `lambda_max`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::model::{ComplexityBand, CostModel};

mod adversary;
mod gmr;
mod largest;
pub mod tridiag;

pub use adversary::{adversary_pair, adversary_pair_with, AdversaryPair};
pub use gmr::{gen_uniform_spectrum, gmr_eig, ritz_eig, EigReport};
pub use largest::{
    lanczos_largest, lanczos_largest_from, lanczos_largest_path, power_largest, power_largest_from,
    LargestReport, TrialSummary,
};

/// Approximate eigenpair: unit `x`, scalar `lambda`, `|Ax - lambda x| / |A|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigPair {
    pub x: Vec<f64>,
    pub lambda: f64,
    pub scaled_residual: f64,
}

/// Start vectors for randomized trials.
///
/// Trial `t` draws its start vector uniformly from the unit sphere (a
/// normalized isotropic Gaussian) using [`crate::rng::stream`]`(seed, t)`, so
/// any single trial can be replayed on its own.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomStartSpec {
    pub seed: u64,
    pub num_trials: usize,
}

impl RandomStartSpec {
    pub fn new(seed: u64, num_trials: usize) -> Result<Self> {
        if num_trials == 0 {
            return Err(invalid("num_trials must be positive"));
        }
        Ok(Self { seed, num_trials })
    }

    pub fn start_vector(&self, trial: usize, n: usize) -> Vec<f64> {
        crate::rng::unit_sphere(&mut crate::rng::stream(self.seed, trial as u64), n)
    }
}

/// Cost band `[c / (4 eps), c / eps]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigBand {
    pub band: ComplexityBand,
    /// False when `n <= 1 / eps`, where the band is not claimed to hold.
    pub in_regime: bool,
}

pub fn eig_complexity_band(eps: f64, model: &CostModel, n: u64) -> Result<EigBand> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(invalid(format!("eps must lie in (0, 1], got {eps}")));
    }
    let c = model.c();
    Ok(EigBand {
        band: ComplexityBand {
            lower: 0.25 * c / eps,
            upper: c / eps,
        },
        in_regime: n as f64 > 1.0 / eps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn band_examples() {
        let b = eig_complexity_band(0.01, &CostModel::new(1e6).unwrap(), 1000).unwrap();
        assert_eq!((b.band.lower, b.band.upper), (2.5e7, 1e8));
        assert!(b.in_regime);
        let b = eig_complexity_band(1.0, &CostModel::new(8.0).unwrap(), 1).unwrap();
        assert_eq!((b.band.lower, b.band.upper), (2.0, 8.0));
        assert!(!b.in_regime);
        assert!(
            !eig_complexity_band(0.01, &CostModel::new(1.0).unwrap(), 100)
                .unwrap()
                .in_regime
        );
    }

    #[test]
    fn start_vectors_replay() {
        let s = RandomStartSpec::new(11, 3).unwrap();
        assert_eq!(s.start_vector(2, 9), s.start_vector(2, 9));
        assert_ne!(s.start_vector(1, 9), s.start_vector(2, 9));
        assert!(RandomStartSpec::new(1, 0).is_err());
    }
}
