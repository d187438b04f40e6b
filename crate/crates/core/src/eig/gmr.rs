//! Residual-minimizing eigenpairs over Krylov spaces.
//!
//! For unit `y` in `R^k` and `x = Q_k y`, `A x - lambda x = Q_{k+1} (T~_k - lambda I~) y`,
//! so
//!
//! ```text
//! |A x - lambda x|^2 = y^T P(lambda) y,   P(lambda) = (T_k - lambda)^2 + beta_k^2 e_k e_k^T.
//! ```
//!
//! For fixed `y` the best `lambda` is the Rayleigh quotient `y^T T_k y`; for
//! fixed `lambda` the best `y` is the lowest eigenvector of the pentadiagonal
//! `P(lambda)`. The minimizer alternates the two (one inverse-iteration step
//! per round, `O(k)` work) and never increases the objective. It is started
//! from every Ritz pair and from the previous step's optimum, and the best
//! result is kept, so the residual never exceeds the best Ritz residual and
//! never grows from one step to the next.
//!
//! Arithmetic charged per step, beyond the Lanczos recurrence: `10 k^2` for
//! the Ritz decomposition and `30 k` per minimizer round. Forming `x = Q_k y`
//! at the end costs `k n`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::eig::tridiag::{ritz_pairs, Pentadiagonal};
use crate::eig::EigPair;
use crate::error::{invalid, Result};
use crate::lanczos::LanczosProcess;
use crate::linear::Instance;
use crate::model::CostLedger;
use crate::oracle::LinearOracle;
use crate::vecops::{norm2, scale};

const MAX_ROUNDS: usize = 200;
const ROUND_TOL: f64 = 1e-10;

/// Outcome of [`gmr_eig`] or [`ritz_eig`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EigReport {
    pub pair: EigPair,
    pub steps: usize,
    pub converged: bool,
    pub breakdown: bool,
    /// Scaled residual of the returned candidate after each step.
    pub residual_history: Vec<f64>,
    /// Scaled residual of the best Ritz pair after each step.
    pub ritz_history: Vec<f64>,
    /// `|A|` used for scaling: the norm hint, else the largest `|Ritz value|`.
    pub norm_used: f64,
    pub ledger: CostLedger,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Gmr,
    Ritz,
}

/// Minimal-residual eigenpair: stops at the first step whose minimum of
/// `|Ax - lambda x| / |A|` over unit `x` in the Krylov space is `<= eps`.
pub fn gmr_eig(oracle: &LinearOracle, b: &[f64], eps: f64, max_k: usize) -> Result<EigReport> {
    run(oracle, b, eps, max_k, Mode::Gmr)
}

/// Lanczos Ritz-pair termination: stops at the first step whose best Ritz pair
/// has scaled residual `<= eps`.
pub fn ritz_eig(oracle: &LinearOracle, b: &[f64], eps: f64, max_k: usize) -> Result<EigReport> {
    run(oracle, b, eps, max_k, Mode::Ritz)
}

fn tri_mul(alpha: &[f64], beta: &[f64], y: &[f64]) -> Vec<f64> {
    let k = y.len();
    (0..k)
        .map(|i| {
            let mut s = alpha[i] * y[i];
            if i > 0 {
                s += beta[i - 1] * y[i - 1];
            }
            if i + 1 < k {
                s += beta[i] * y[i + 1];
            }
            s
        })
        .collect()
}

/// `(lambda, |(T - lambda) y|^2 + tail^2 y_k^2)` with `lambda` the Rayleigh quotient.
fn evaluate(alpha: &[f64], beta: &[f64], tail: f64, y: &[f64]) -> (f64, f64) {
    let ty = tri_mul(alpha, beta, y);
    let lambda: f64 = ty.iter().zip(y).map(|(a, b)| a * b).sum();
    let mut obj: f64 = ty
        .iter()
        .zip(y)
        .map(|(t, v)| (t - lambda * v).powi(2))
        .sum();
    obj += (tail * y[y.len() - 1]).powi(2);
    (lambda, obj)
}

/// Alternating minimization from unit `y`; returns `(objective, lambda, y, rounds)`.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
fn refine(alpha: &[f64], beta: &[f64], tail: f64, y0: &[f64]) -> (f64, f64, Vec<f64>, usize) {
    let mut y = y0.to_vec();
    let (mut lambda, mut obj) = evaluate(alpha, beta, tail, &y);
    let mut rounds = 0;
    while rounds < MAX_ROUNDS {
        rounds += 1;
        let p = Pentadiagonal::shifted_square(alpha, beta, lambda, tail);
        let pmax =
            p.d0.iter()
                .fold(0.0f64, |m, v| m.max(v.abs()))
                .max(f64::MIN_POSITIVE);
        let mut z = p.solve_shifted(&y, 0.0, f64::EPSILON * pmax);
        let nz = norm2(&z);
        if !(nz.is_finite() && nz > 0.0) {
            break;
        }
        scale(1.0 / nz, &mut z);
        let (l_new, o_new) = evaluate(alpha, beta, tail, &z);
        if !(o_new < obj) {
            break;
        }
        let gain = obj - o_new;
        y = z;
        lambda = l_new;
        obj = o_new;
        if gain <= ROUND_TOL * obj || obj <= (f64::EPSILON * pmax.sqrt()).powi(2) {
            break;
        }
    }
    (obj.max(0.0), lambda, y, rounds)
}

fn run(oracle: &LinearOracle, b: &[f64], eps: f64, max_k: usize, mode: Mode) -> Result<EigReport> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(invalid(format!("eps must lie in (0, 1], got {eps}")));
    }
    if max_k == 0 {
        return Err(invalid("max_k must be at least 1"));
    }
    let mut ledger = CostLedger::new();
    let mut lz = LanczosProcess::new(oracle, b, false)?;
    let mut residual_history = Vec::new();
    let mut ritz_history = Vec::new();
    let mut prev_y: Vec<f64> = Vec::new();
    let mut best = (f64::INFINITY, 0.0, Vec::new());
    let mut norm_used = 0.0f64;
    let mut converged = false;
    let mut breakdown = false;

    while lz.steps() < max_k {
        let step = lz.step(&mut ledger)?;
        breakdown = step.breakdown;
        let k = lz.steps();
        let alpha = lz.alpha();
        let beta = &lz.beta()[..k - 1];
        let tail = lz.beta()[k - 1];
        let (theta, vecs): (Vec<f64>, DMatrix<f64>) = ritz_pairs(alpha, beta);
        ledger.charge_combinatory(10 * (k * k) as u64);

        let ritz_abs = theta.iter().fold(0.0f64, |m, t| m.max(t.abs()));
        norm_used = oracle.norm_hint().unwrap_or(norm_used.max(ritz_abs));
        let norm = if norm_used > 0.0 { norm_used } else { 1.0 };

        let (mut ritz_best, mut ritz_res) = (0, f64::INFINITY);
        for i in 0..k {
            let r = (tail * vecs[(k - 1, i)]).abs();
            if r < ritz_res {
                ritz_res = r;
                ritz_best = i;
            }
        }
        ritz_history.push(ritz_res / norm);
        let ritz_y: Vec<f64> = vecs.column(ritz_best).iter().copied().collect();

        best = match mode {
            Mode::Ritz => (ritz_res * ritz_res, theta[ritz_best], ritz_y),
            Mode::Gmr => {
                let mut starts: Vec<Vec<f64>> = (0..k)
                    .map(|i| vecs.column(i).iter().copied().collect())
                    .collect();
                if !prev_y.is_empty() {
                    let mut y = prev_y.clone();
                    y.push(0.0);
                    starts.push(y);
                }
                let mut top = (ritz_res * ritz_res, theta[ritz_best], ritz_y);
                let mut rounds = 0;
                for s in &starts {
                    let (obj, lambda, y, r) = refine(alpha, beta, tail, s);
                    rounds += r;
                    if obj < top.0 {
                        top = (obj, lambda, y);
                    }
                }
                ledger.charge_combinatory(30 * (k * rounds) as u64);
                prev_y = top.2.clone();
                top
            }
        };
        let scaled = best.0.sqrt() / norm;
        residual_history.push(scaled);
        if scaled <= eps || breakdown {
            converged = scaled <= eps;
            break;
        }
    }

    let k = lz.steps();
    let mut x = lz.combine(&best.2);
    ledger.charge_combinatory((k * oracle.dim()) as u64);
    let nx = norm2(&x);
    scale(1.0 / nx, &mut x);
    let norm = if norm_used > 0.0 { norm_used } else { 1.0 };
    Ok(EigReport {
        pair: EigPair {
            x,
            lambda: best.1,
            scaled_residual: best.0.sqrt() / norm,
        },
        steps: k,
        converged,
        breakdown,
        residual_history,
        ritz_history,
        norm_used: norm,
        ledger,
    })
}

/// Hard instance for eigenpair residuals: `n` eigenvalues equally spaced on
/// `[-1, 1]` and a start vector whose weight `(1 - t^2)^4` fades towards the
/// ends of the spectrum, so no eigenvector is favored and the extreme ones
/// are barely visible. `|A| = 1`.
pub fn gen_uniform_spectrum(n: usize) -> Result<Instance> {
    if n < 2 {
        return Err(invalid("uniform spectrum needs n >= 2"));
    }
    let eigenvalues: Vec<f64> = (0..n)
        .map(|i| -1.0 + 2.0 * i as f64 / (n - 1) as f64)
        .collect();
    let mut b: Vec<f64> = eigenvalues.iter().map(|t| (1.0 - t * t).powi(4)).collect();
    let nb = norm2(&b);
    scale(1.0 / nb, &mut b);
    let oracle = LinearOracle::diagonal(eigenvalues.clone()).with_norm_hint(1.0);
    Ok(Instance {
        oracle,
        b,
        eigenvalues,
        matrix: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn scaled_identity_is_solved_at_once() {
        let oracle = LinearOracle::diagonal(vec![3.0; 5]);
        let b = [0.6, 0.0, 0.8, 0.0, 0.0];
        let rep = gmr_eig(&oracle, &b, 1e-12, 10).unwrap();
        assert_eq!(rep.steps, 1);
        assert_eq!(rep.pair.lambda, 3.0);
        assert!(rep.pair.scaled_residual < 1e-15);
        assert!(rep.converged);
    }

    #[test]
    fn invariant_start_vector() {
        let oracle = LinearOracle::diagonal(vec![1.0, -1.0]);
        let rep = gmr_eig(&oracle, &[1.0, 0.0], 1e-12, 5).unwrap();
        assert_eq!(rep.steps, 1);
        assert_eq!(rep.pair.lambda, 1.0);
        assert_eq!(rep.pair.x, vec![1.0, 0.0]);
        assert_eq!(rep.pair.scaled_residual, 0.0);
    }

    #[test]
    fn gmr_beats_ritz_and_is_monotone() {
        let inst = gen_uniform_spectrum(300).unwrap();
        let g = gmr_eig(&inst.oracle, &inst.b, 1e-9, 25).unwrap();
        for (a, r) in g.residual_history.iter().zip(&g.ritz_history) {
            assert!(*a <= r + 1e-14);
        }
        assert!(g.residual_history.windows(2).all(|w| w[1] <= w[0] + 1e-14));
        let r = ritz_eig(&inst.oracle, &inst.b, 0.05, 300).unwrap();
        let g = gmr_eig(&inst.oracle, &inst.b, 0.05, 300).unwrap();
        assert!(g.steps <= r.steps);
    }

    #[test]
    fn reported_residual_is_real() {
        let inst = gen_uniform_spectrum(200).unwrap();
        let rep = gmr_eig(&inst.oracle, &inst.b, 0.05, 200).unwrap();
        let x = &rep.pair.x;
        assert!((norm2(x) - 1.0).abs() < 1e-10);
        let r: Vec<f64> = x
            .iter()
            .zip(&inst.eigenvalues)
            .map(|(xi, d)| d * xi - rep.pair.lambda * xi)
            .collect();
        assert!((norm2(&r) - rep.pair.scaled_residual).abs() < 1e-8);
    }

    #[test]
    fn rejects_bad_arguments() {
        let oracle = LinearOracle::diagonal(vec![1.0, 2.0]);
        assert!(gmr_eig(&oracle, &[1.0, 0.0], 0.0, 3).is_err());
        assert!(gmr_eig(&oracle, &[1.0, 0.0], 0.1, 0).is_err());
        assert!(matches!(
            gmr_eig(&oracle, &[0.0, 0.0], 0.1, 3),
            Err(Error::ZeroRhs)
        ));
    }
}
