//! Versioned pass/fail tolerances and per-kind parameter defaults.
//!
//! Every threshold an experiment or the acceptance suite asserts against is
//! read from [`TOLERANCES`]. Changing a value means bumping
//! [`TOLERANCES_VERSION`]; manifests record the version they were judged by.

use serde::{Deserialize, Serialize};

use super::spec::{ExperimentKind, ExperimentParams};

pub const TOLERANCES_VERSION: u32 = 1;

/// A target value with a symmetric acceptance window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub target: f64,
    pub half_width: f64,
}

impl Window {
    pub fn contains(&self, x: f64) -> bool {
        (x - self.target).abs() <= self.half_width
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Allowed `|measured - predicted|` minres steps on F1 instances.
    pub f1_steps: u64,
    /// Same for F2.
    pub f2_steps: u64,
    /// Allowed relative deviation of the definiteness ratio from `1 / (2 sqrt M)`.
    pub definiteness_ratio_rel: f64,
    /// Extra minres steps allowed over the guaranteed Chebyshev degree.
    pub rho_extra_steps: u64,
    /// `|minres residual - dense least-squares residual|`.
    pub polynomial_optimality: f64,
    /// `|gmr residual - dense subspace minimum|`.
    pub gmr_brute_force: f64,
    /// Krylov information defect and Lanczos estimate difference in the adversary check.
    pub adversary_information: f64,
    /// Log-log slope of mean randomized Lanczos error in `k`.
    pub lanczos_slope: Window,
    /// Log-log slope of mean integration error over `sqrt(ln n)` in `n`.
    pub integration_slope: Window,
    /// Smallest `n` from which Hammersley must beat Monte Carlo.
    pub integration_qmc_from: usize,
    /// Ledger bound: combinatory operations per step and dimension.
    pub ops_per_step_and_dim: u64,
}

pub const TOLERANCES: Tolerances = Tolerances {
    f1_steps: 1,
    f2_steps: 2,
    definiteness_ratio_rel: 0.20,
    rho_extra_steps: 1,
    polynomial_optimality: 1e-8,
    gmr_brute_force: 1e-6,
    adversary_information: 1e-12,
    lanczos_slope: Window {
        target: -2.0,
        half_width: 0.3,
    },
    integration_slope: Window {
        target: -1.0,
        half_width: 0.25,
    },
    integration_qmc_from: 256,
    ops_per_step_and_dim: 10,
};

/// Default parameters of each experiment kind. `c` is left out: it defaults to `n`.
pub fn default_params(kind: ExperimentKind) -> ExperimentParams {
    let p = ExperimentParams {
        seed: Some(0),
        ..Default::default()
    };
    match kind {
        ExperimentKind::LinearF1 => ExperimentParams {
            n: Some(200),
            m: Some(100.0),
            eps: Some(vec![1e-1, 1e-2, 1e-3]),
            ..p
        },
        ExperimentKind::LinearF2 => ExperimentParams {
            n: Some(400),
            m: Some(10.0),
            eps: Some(vec![1e-2]),
            ..p
        },
        ExperimentKind::LinearRho => ExperimentParams {
            n: Some(300),
            rho: Some(0.5),
            eps: Some(vec![1e-2]),
            trials: Some(10),
            ..p
        },
        ExperimentKind::EigGmr => ExperimentParams {
            n: Some(2000),
            eps: Some(vec![1e-1, 1e-2]),
            seed: None,
            ..p
        },
        ExperimentKind::EigLanczosRandom => ExperimentParams {
            n: Some(1000),
            k: Some((1..=10).map(|i| 10 * i).collect()),
            trials: Some(100),
            seed: Some(2024),
            ..p
        },
        ExperimentKind::IntegrateAvg => ExperimentParams {
            d: Some(2),
            eps: Some((3..=8).map(|e| 2f64.powi(-e)).collect()),
            paths: Some(200),
            grid_m: Some(256),
            seed: Some(90210),
            ..p
        },
        ExperimentKind::Adversary => ExperimentParams {
            n: Some(2),
            mu: Some(5.0),
            ..p
        },
    }
}
