//! Randomized-start estimates of the largest eigenvalue.
//!
//! Both estimators spend `k` products per trial:
//!
//! * Lanczos: the largest eigenvalue of `T_k`, i.e. the best Rayleigh
//!   quotient over `span{b, ..., A^{k-1} b}`.
//! * Power: the Rayleigh quotient of `A^{k-1} b`, which lies in that span, so
//!   the Lanczos estimate is never smaller.
//!
//! Trials run in parallel; trial `t` owns its ledger and its start vector
//! (see [`RandomStartSpec`]).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eig::tridiag::largest_eigenvalue;
use crate::eig::RandomStartSpec;
use crate::error::{invalid, Result};
use crate::lanczos::LanczosProcess;
use crate::model::CostLedger;
use crate::oracle::LinearOracle;
use crate::vecops::{dot, norm2, scale};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub mean: f64,
    pub std_dev: f64,
    pub min: f64,
    pub max: f64,
}

impl TrialSummary {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = if values.len() > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Self {
            mean,
            std_dev: var.sqrt(),
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LargestReport {
    pub k: usize,
    pub estimates: Vec<f64>,
    /// The Krylov space of the trial became invariant before `k` products;
    /// its estimate is then exact for that space.
    pub breakdown: Vec<bool>,
    pub ledgers: Vec<CostLedger>,
    pub summary: TrialSummary,
}

/// Largest Ritz value after each of the first `k_max` steps from start `b`.
/// After a breakdown the last value is repeated. Returns the path, a
/// breakdown flag and the ledger.
fn lanczos_path(
    oracle: &LinearOracle,
    b: &[f64],
    k_max: usize,
) -> Result<(Vec<f64>, bool, CostLedger)> {
    let mut ledger = CostLedger::new();
    let mut lz = LanczosProcess::new(oracle, b, false)?;
    let mut path = Vec::with_capacity(k_max);
    let mut floor: Option<f64> = None;
    while path.len() < k_max {
        if lz.is_exhausted() {
            let last = *path.last().expect("at least one step precedes breakdown");
            path.push(last);
            continue;
        }
        lz.step(&mut ledger)?;
        let k = lz.steps();
        let est = largest_eigenvalue(lz.alpha(), &lz.beta()[..k - 1], floor);
        // bisection: about 60 Sturm sweeps of 3k operations each
        ledger.charge_combinatory(180 * k as u64);
        floor = Some(est);
        path.push(est);
    }
    Ok((path, lz.is_exhausted(), ledger))
}

/// Deterministic Lanczos estimate of `lambda_max` from start `b` after `k` products.
pub fn lanczos_largest_from(oracle: &LinearOracle, b: &[f64], k: usize) -> Result<f64> {
    if k == 0 {
        return Err(invalid("k must be positive"));
    }
    Ok(*lanczos_path(oracle, b, k)?.0.last().expect("k > 0"))
}

/// Lanczos estimates for every trial of `start`.
pub fn lanczos_largest(
    oracle: &LinearOracle,
    start: &RandomStartSpec,
    k: usize,
) -> Result<LargestReport> {
    if k == 0 {
        return Err(invalid("k must be positive"));
    }
    let n = oracle.dim();
    let runs: Vec<(Vec<f64>, bool, CostLedger)> = (0..start.num_trials)
        .into_par_iter()
        .map(|t| lanczos_path(oracle, &start.start_vector(t, n), k))
        .collect::<Result<_>>()?;
    let estimates: Vec<f64> = runs.iter().map(|r| *r.0.last().expect("k > 0")).collect();
    Ok(LargestReport {
        k,
        summary: TrialSummary::of(&estimates),
        estimates,
        breakdown: runs.iter().map(|r| r.1).collect(),
        ledgers: runs.iter().map(|r| r.2).collect(),
    })
}

/// Per-trial estimates for `k = 1..=k_max` (`result[t][k - 1]`), from one run per trial.
pub fn lanczos_largest_path(
    oracle: &LinearOracle,
    start: &RandomStartSpec,
    k_max: usize,
) -> Result<Vec<Vec<f64>>> {
    if k_max == 0 {
        return Err(invalid("k must be positive"));
    }
    let n = oracle.dim();
    (0..start.num_trials)
        .into_par_iter()
        .map(|t| lanczos_path(oracle, &start.start_vector(t, n), k_max).map(|r| r.0))
        .collect()
}

/// Rayleigh quotient of `A^{k-1} b` (normalized), using `k` products.
pub fn power_largest_from(oracle: &LinearOracle, b: &[f64], k: usize) -> Result<(f64, CostLedger)> {
    if k == 0 {
        return Err(invalid("k must be positive"));
    }
    let n = oracle.dim();
    let nb = norm2(b);
    if nb == 0.0 {
        return Err(crate::error::Error::ZeroRhs);
    }
    let mut ledger = CostLedger::new();
    let mut v = b.to_vec();
    scale(1.0 / nb, &mut v);
    for _ in 1..k {
        let mut w = oracle.apply(&v, &mut ledger);
        let nw = norm2(&w);
        ledger.charge_combinatory(2 * n as u64 + 1);
        if nw == 0.0 {
            return Ok((0.0, ledger));
        }
        scale(1.0 / nw, &mut w);
        v = w;
    }
    let av = oracle.apply(&v, &mut ledger);
    ledger.charge_combinatory(n as u64);
    Ok((dot(&v, &av), ledger))
}

/// Power-method estimates for every trial of `start`.
pub fn power_largest(
    oracle: &LinearOracle,
    start: &RandomStartSpec,
    k: usize,
) -> Result<LargestReport> {
    let n = oracle.dim();
    let runs: Vec<(f64, CostLedger)> = (0..start.num_trials)
        .into_par_iter()
        .map(|t| power_largest_from(oracle, &start.start_vector(t, n), k))
        .collect::<Result<_>>()?;
    let estimates: Vec<f64> = runs.iter().map(|r| r.0).collect();
    Ok(LargestReport {
        k,
        summary: TrialSummary::of(&estimates),
        estimates,
        breakdown: vec![false; runs.len()],
        ledgers: runs.iter().map(|r| r.1).collect(),
    })
}
