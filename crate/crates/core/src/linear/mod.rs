//! Large symmetric linear systems `Ax = b` under matrix-vector information.
//!
//! * [`minres_solve`]: the minimal residual polynomial method on Lanczos vectors.
//! * [`chebyshev_solve`]: fixed-step Chebyshev semi-iteration for `A = I - B`, `|B| <= rho`.
//! * [`cardinality`]: closed-form step counts and complexity bands per matrix class.
//! * [`generators`]: instances that attain the step-count formulas.
//! * [`brute_force_min_residual`]: dense least-squares reference for small `n`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::lanczos::KrylovTrace;
use crate::model::CostLedger;

mod brute;
pub mod cardinality;
mod chebyshev;
pub mod generators;
mod minres;

pub use brute::{brute_force_min_residual, BruteForceResidual};
pub use cardinality::{
    asymptotic_f1, asymptotic_f2, cardinality_f1, cardinality_f2, complexity_band_linear,
    positive_definiteness_gain, DefinitenessGain,
};
pub use chebyshev::{chebyshev_solve, guaranteed_chebyshev_steps, ChebyshevReport};
pub use generators::{
    gen_rho_instance, gen_worst_case_spectrum, gen_worst_case_spectrum_for, Instance,
};
pub use minres::{minres_solve, minres_solve_with, MinresOptions};

/// The a-priori class a system matrix is promised to belong to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MatrixClassSpec {
    /// Symmetric positive definite with condition number at most `m`.
    F1 { m: f64 },
    /// Symmetric invertible with condition number at most `m`.
    F2 { m: f64 },
    /// `I - B` with `B` symmetric and `|B| <= rho < 1`.
    Rho { rho: f64 },
}

impl MatrixClassSpec {
    pub fn f1(m: f64) -> Result<Self> {
        check_condition(m)?;
        Ok(Self::F1 { m })
    }

    pub fn f2(m: f64) -> Result<Self> {
        check_condition(m)?;
        Ok(Self::F2 { m })
    }

    pub fn rho(rho: f64) -> Result<Self> {
        if !(rho > 0.0 && rho < 1.0) {
            return Err(invalid(format!("rho must lie in (0, 1), got {rho}")));
        }
        Ok(Self::Rho { rho })
    }

    /// Re-checks the parameter range, for values that arrived through deserialization.
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::F1 { m } | Self::F2 { m } => check_condition(m),
            Self::Rho { rho } => Self::rho(rho).map(|_| ()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::F1 { .. } => "F1",
            Self::F2 { .. } => "F2",
            Self::Rho { .. } => "Rho",
        }
    }

    /// `M` for the condition-number classes, `rho` otherwise.
    pub fn parameter(&self) -> f64 {
        match *self {
            Self::F1 { m } | Self::F2 { m } => m,
            Self::Rho { rho } => rho,
        }
    }
}

fn check_condition(m: f64) -> Result<()> {
    if !(m.is_finite() && m >= 1.0) {
        return Err(invalid(format!(
            "condition bound M must be finite and >= 1, got {m}"
        )));
    }
    Ok(())
}

/// Outcome of a residual-minimizing solve.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveReport {
    /// Approximate solution for the right-hand side as given.
    pub x: Vec<f64>,
    /// Lanczos steps taken, one matrix-vector product each.
    pub steps: usize,
    /// `|Ax - b|` for the right-hand side as given.
    pub final_residual: f64,
    /// `|b|`; tolerances and `trace.residual_history` refer to `b / |b|`.
    pub rhs_norm: f64,
    /// The relative residual reached the tolerance.
    pub converged: bool,
    /// The Krylov space became invariant (the residual is then zero up to rounding).
    pub breakdown: bool,
    pub ledger: CostLedger,
    /// Floating-point work spent on reorthogonalization and residual refreshes,
    /// kept out of the ledger because exact arithmetic does not need it.
    pub stabilization_ops: u64,
    /// Largest gap seen between the recurrence residual estimate and the
    /// directly recomputed residual.
    pub residual_drift: f64,
    pub trace: KrylovTrace,
}

impl SolveReport {
    /// Converts a non-converged report into [`Error::NotConverged`].
    pub fn ensure_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NotConverged {
                steps: self.steps,
                residual: self.final_residual / self.rhs_norm,
            })
        }
    }
}
