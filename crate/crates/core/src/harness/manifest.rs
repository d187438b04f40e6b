//! Run manifests: the effective spec, per-cell records and embedded checks.

use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::defaults::TOLERANCES_VERSION;
use super::spec::{ExperimentKind, ExperimentSpec};
use crate::integrate::ErrorPoint;

pub const SCHEMA_VERSION: u32 = 1;

/// One (instance, eps) cell of a linear experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearRecord {
    pub kind: ExperimentKind,
    pub n: usize,
    /// `M` for F1/F2, `rho` for the Rho class.
    pub m_or_rho: f64,
    pub eps: f64,
    /// Step count from the closed-form formula (Chebyshev degree for Rho).
    pub predicted_m: u64,
    pub measured_steps: Option<usize>,
    pub band_lo: Option<f64>,
    pub band_hi: Option<f64>,
    pub ledger_total: Option<f64>,
    pub pass: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigRecord {
    pub n: usize,
    pub eps: f64,
    pub gmr_steps: usize,
    pub ritz_steps: usize,
    pub scaled_residual: f64,
    pub band_lo: f64,
    pub band_hi: f64,
    pub in_regime: bool,
    pub ledger_total: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LanczosRecord {
    pub n: usize,
    pub k: usize,
    pub trials: usize,
    /// Mean of `lambda_max - estimate` over the random starts.
    pub lanczos_mean_error: f64,
    pub lanczos_std_dev: f64,
    pub power_mean_error: f64,
    /// `((ln n) / k)^2`: the shape of the upper bound, constant omitted.
    pub bound_shape: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdversaryRecord {
    pub n: usize,
    pub k: usize,
    pub mu: f64,
    pub information_defect: f64,
    pub lambda_max_1: f64,
    pub lambda_max_2: f64,
    pub gap: f64,
    pub estimate_1: f64,
    pub estimate_2: f64,
    pub pass: bool,
}

/// Records of one experiment; the variant fixes the table layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "table", content = "rows", rename_all = "snake_case")]
pub enum Records {
    Linear(Vec<LinearRecord>),
    Eig(Vec<EigRecord>),
    Lanczos(Vec<LanczosRecord>),
    Integration(Vec<ErrorPoint>),
    Adversary(Vec<AdversaryRecord>),
}

impl Records {
    pub fn empty_for(kind: ExperimentKind) -> Self {
        match kind {
            ExperimentKind::LinearF1 | ExperimentKind::LinearF2 | ExperimentKind::LinearRho => {
                Records::Linear(Vec::new())
            }
            ExperimentKind::EigGmr => Records::Eig(Vec::new()),
            ExperimentKind::EigLanczosRandom => Records::Lanczos(Vec::new()),
            ExperimentKind::IntegrateAvg => Records::Integration(Vec::new()),
            ExperimentKind::Adversary => Records::Adversary(Vec::new()),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Records::Linear(r) => r.len(),
            Records::Eig(r) => r.len(),
            Records::Lanczos(r) => r.len(),
            Records::Integration(r) => r.len(),
            Records::Adversary(r) => r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A named assertion evaluated against the pinned tolerances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub artifact_version: String,
    pub tolerances_version: u32,
    /// Seconds since the Unix epoch; the only field a replay may change.
    pub timestamp: u64,
    /// Effective spec after config merging and defaults.
    pub spec: ExperimentSpec,
    pub records: Records,
    pub checks: Vec<Check>,
    pub all_pass: bool,
}

impl RunManifest {
    pub fn new(spec: ExperimentSpec) -> Self {
        let timestamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Self {
            schema_version: SCHEMA_VERSION,
            artifact_version: env!("CARGO_PKG_VERSION").to_string(),
            tolerances_version: TOLERANCES_VERSION,
            timestamp,
            records: Records::empty_for(spec.kind),
            spec,
            checks: Vec::new(),
            all_pass: true,
        }
    }

    pub fn push_check(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.all_pass &= pass;
        self.checks.push(Check {
            name: name.into(),
            pass,
            detail: detail.into(),
        });
    }

    /// Equality of everything a replay must reproduce (all but the timestamp).
    pub fn same_payload(&self, other: &RunManifest) -> bool {
        let mut a = self.clone();
        a.timestamp = other.timestamp;
        &a == other
    }
}
