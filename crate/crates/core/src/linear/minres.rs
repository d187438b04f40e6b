//! Minimal residual iteration for symmetric systems.
//!
//! After `k` products the iterate `x_k` minimizes `|A x - b|` over the Krylov
//! space `span{b, Ab, ..., A^{k-1} b}`, i.e. `|W_k(A) b|` over residual
//! polynomials of degree `<= k` with `W_k(0) = 1`. The least-squares problem
//! on the `(k+1) x k` tridiagonal `T~_k` is kept in QR form by Givens
//! rotations, one new rotation per step, so the residual norm `|phi_bar_k|`
//! is available without forming `x_k`.
//!
//! Arithmetic charged per step, on top of the Lanczos recurrence:
//!
//! | part                                  | operations |
//! |---------------------------------------|------------|
//! | rotation `k-2` on the new column      | 2 (k >= 3) |
//! | rotation `k-1` on the new column      | 4 (k >= 2) |
//! | new rotation (`hypot`, two divisions) | 5          |
//! | right-hand side update                | 2          |
//!
//! The solution is assembled once, at termination: back substitution (at
//! most `3k`) and `x = Q_k y` (`k n`). Together with the recurrence this is
//! `6kn + 20k` at most, below `10kn` for `n >= 5`.

use crate::error::{invalid, Result};
use crate::lanczos::LanczosProcess;
use crate::linear::SolveReport;
use crate::model::CostLedger;
use crate::oracle::LinearOracle;
use crate::vecops::{norm2, scale, sub};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinresOptions {
    /// Spend one extra product on `A x` to report a residual computed from
    /// scratch. Charged to the ledger.
    pub verify: bool,
    /// Steps between direct residual recomputations.
    pub refresh_every: usize,
}

impl Default for MinresOptions {
    fn default() -> Self {
        Self {
            verify: false,
            refresh_every: 10,
        }
    }
}

pub fn minres_solve(
    oracle: &LinearOracle,
    b: &[f64],
    eps: f64,
    max_k: usize,
) -> Result<SolveReport> {
    minres_solve_with(oracle, b, eps, max_k, &MinresOptions::default())
}

/// Upper-triangular factor `R_k` of `T~_k` plus the rotated right-hand side.
#[derive(Default)]
struct GivensQr {
    gamma: Vec<f64>,
    /// `delta[j]`: entry (j-1, j).
    delta: Vec<f64>,
    /// `epsilon[j]`: entry (j-2, j).
    epsilon: Vec<f64>,
    tau: Vec<f64>,
    rot1: (f64, f64),
    rot2: (f64, f64),
    phi_bar: f64,
}

impl GivensQr {
    fn new() -> Self {
        Self {
            rot1: (1.0, 0.0),
            rot2: (1.0, 0.0),
            phi_bar: 1.0,
            ..Default::default()
        }
    }

    /// Folds in column `j` (1-based) of `T~`: `beta_prev` above the diagonal,
    /// `alpha` on it, `beta` below. Returns the operations used.
    fn push(&mut self, j: usize, beta_prev: f64, alpha: f64, beta: f64) -> u64 {
        let mut ops = 0;
        let (c2, s2) = self.rot2;
        let (c1, s1) = self.rot1;
        let eps_j = s2 * beta_prev;
        let delta_bar = c2 * beta_prev;
        if j >= 3 {
            ops += 2;
        }
        let delta_j = c1 * delta_bar + s1 * alpha;
        let gamma_bar = -s1 * delta_bar + c1 * alpha;
        if j >= 2 {
            ops += 4;
        }
        let gamma = gamma_bar.hypot(beta);
        let (c, s) = if gamma == 0.0 {
            (1.0, 0.0)
        } else {
            (gamma_bar / gamma, beta / gamma)
        };
        ops += 5;
        self.tau.push(c * self.phi_bar);
        self.phi_bar *= -s;
        ops += 2;
        self.gamma.push(gamma);
        self.delta.push(delta_j);
        self.epsilon.push(eps_j);
        self.rot2 = self.rot1;
        self.rot1 = (c, s);
        ops
    }

    /// Solves `R_k y = tau`; returns `y` and the operation count.
    fn solve(&self) -> (Vec<f64>, u64) {
        let k = self.gamma.len();
        let mut y = vec![0.0; k];
        let mut ops = 0;
        for j in (0..k).rev() {
            let mut acc = self.tau[j];
            if j + 1 < k {
                acc -= self.delta[j + 1] * y[j + 1];
                ops += 1;
            }
            if j + 2 < k {
                acc -= self.epsilon[j + 2] * y[j + 2];
                ops += 1;
            }
            y[j] = if self.gamma[j] == 0.0 {
                0.0
            } else {
                acc / self.gamma[j]
            };
            ops += 1;
        }
        (y, ops)
    }
}

/// Minimal residual solve of `A x = b` to relative residual `eps`, with at most `max_k` products.
///
/// `b` is normalized first; `eps` and the residual history refer to `b / |b|`
/// while `x` and `final_residual` refer to `b` as given. The iteration stops at
/// the first step whose residual estimate and directly recomputed residual are
/// both `<= eps`, when the Krylov space becomes invariant, or after `max_k`
/// steps (reported with `converged = false`).
pub fn minres_solve_with(
    oracle: &LinearOracle,
    b: &[f64],
    eps: f64,
    max_k: usize,
    options: &MinresOptions,
) -> Result<SolveReport> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(invalid(format!("eps must be positive, got {eps}")));
    }
    if max_k == 0 {
        return Err(invalid("max_k must be at least 1"));
    }
    let refresh = options.refresh_every.max(1);
    let n = oracle.dim();
    let rhs_norm = norm2(b);
    let mut ledger = CostLedger::new();
    let mut lz = LanczosProcess::new(oracle, b, true)?;
    let b_unit = lz.basis()[0].clone();

    let mut qr = GivensQr::new();
    let mut history = vec![1.0];
    let mut direct = 1.0;
    let mut drift = 0.0f64;
    let mut y = Vec::new();
    let mut converged = false;
    let mut breakdown = false;

    while lz.steps() < max_k {
        let step = lz.step(&mut ledger)?;
        let j = lz.steps();
        let beta_prev = if j > 1 { lz.beta()[j - 2] } else { 0.0 };
        let ops = qr.push(j, beta_prev, step.alpha, step.beta);
        ledger.charge_combinatory(ops);
        let estimate = qr.phi_bar.abs();
        history.push(estimate);
        breakdown = step.breakdown;

        let candidate = estimate <= eps || breakdown;
        if candidate || j % refresh == 0 || j == max_k {
            let (y_j, _) = qr.solve();
            let r = sub(&lz.combine_images(&y_j), &b_unit);
            direct = norm2(&r);
            drift = drift.max((direct - estimate).abs());
            lz.add_stabilization_ops(3 * j as u64 + (j as u64 + 2) * n as u64);
            y = y_j;
            if candidate && (direct <= eps || breakdown) {
                converged = direct <= eps || estimate <= eps;
                break;
            }
        }
    }

    // assembling the answer is part of the algorithm and is charged
    let (_, back_ops) = qr.solve();
    ledger.charge_combinatory(back_ops + (y.len() * n) as u64);
    let mut x = lz.combine(&y);
    scale(rhs_norm, &mut x);
    let mut final_residual = direct * rhs_norm;
    if options.verify {
        let ax = oracle.apply(&x, &mut ledger);
        final_residual = norm2(&sub(&ax, b));
    }

    Ok(SolveReport {
        x,
        steps: lz.steps(),
        final_residual,
        rhs_norm,
        converged,
        breakdown,
        ledger,
        stabilization_ops: lz.stabilization_ops(),
        residual_drift: drift,
        trace: lz.trace(history),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn identity_converges_in_one_step() {
        let oracle = LinearOracle::diagonal(vec![1.0; 7]);
        let mut b = vec![0.0; 7];
        b[0] = 1.0;
        let rep = minres_solve(&oracle, &b, 1e-12, 50).unwrap();
        assert_eq!(rep.steps, 1);
        assert!(rep.converged && rep.breakdown);
        assert_eq!(rep.x, b);
        assert!(rep.final_residual < 1e-15);
        assert_eq!(rep.ledger.info_count(), 1);
    }

    #[test]
    fn minimal_polynomial_degree_three() {
        let oracle = LinearOracle::diagonal(vec![1.0, 2.0, 3.0]);
        let s = 1.0 / 3f64.sqrt();
        let rep = minres_solve(&oracle, &[s, s, s], 1e-12, 10).unwrap();
        assert!(rep.steps <= 3);
        assert!(rep.final_residual < 1e-12);
        let expect = [s, s / 2.0, s / 3.0];
        for (a, e) in rep.x.iter().zip(expect) {
            assert!((a - e).abs() < 1e-12);
        }
    }

    #[test]
    fn nonunit_rhs_is_scaled_back() {
        let oracle = LinearOracle::diagonal(vec![1.0, 2.0, 4.0, 8.0]);
        let b = [3.0, 0.0, 4.0, 0.0];
        let rep = minres_solve(&oracle, &b, 1e-10, 10).unwrap();
        assert_eq!(rep.rhs_norm, 5.0);
        assert!((rep.x[0] - 3.0).abs() < 1e-10 && (rep.x[2] - 1.0).abs() < 1e-10);
        assert!(rep.final_residual < 5e-10);
    }

    #[test]
    fn verification_costs_one_product() {
        let oracle = LinearOracle::diagonal((1..=30).map(f64::from).collect());
        let b = vec![1.0; 30];
        let opts = MinresOptions {
            verify: true,
            ..Default::default()
        };
        let rep = minres_solve_with(&oracle, &b, 1e-6, 100, &opts).unwrap();
        assert_eq!(rep.ledger.info_count() as usize, rep.steps + 1);
        let plain = minres_solve(&oracle, &b, 1e-6, 100).unwrap();
        assert_eq!(plain.ledger.info_count() as usize, plain.steps);
        assert!((rep.final_residual - plain.final_residual).abs() < 1e-10);
    }

    #[test]
    fn reports_non_convergence() {
        let oracle = LinearOracle::diagonal((1..=100).map(f64::from).collect());
        let rep = minres_solve(&oracle, &vec![0.1; 100], 1e-12, 5).unwrap();
        assert!(!rep.converged);
        assert_eq!(rep.steps, 5);
        assert!(matches!(
            rep.ensure_converged(),
            Err(Error::NotConverged { steps: 5, .. })
        ));
    }

    #[test]
    fn indefinite_system() {
        let oracle = LinearOracle::diagonal(vec![-3.0, -1.0, 1.0, 2.0, 5.0]);
        let rep = minres_solve(&oracle, &[1.0; 5], 1e-12, 10).unwrap();
        assert!(rep.converged);
        assert!((rep.x[0] * 3.0 + 1.0).abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_arguments() {
        let oracle = LinearOracle::diagonal(vec![1.0, 2.0]);
        assert!(matches!(
            minres_solve(&oracle, &[0.0, 0.0], 0.1, 5),
            Err(Error::ZeroRhs)
        ));
        assert!(minres_solve(&oracle, &[1.0, 0.0], 0.0, 5).is_err());
        assert!(minres_solve(&oracle, &[1.0, 0.0], 0.1, 0).is_err());
        assert!(matches!(
            minres_solve(&oracle, &[1.0], 0.1, 5),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
