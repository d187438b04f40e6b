//! Chebyshev semi-iteration for `A = I - B`, `B` symmetric, `|B| <= rho < 1`.
//!
//! The spectrum of `A` lies in `[1 - rho, 1 + rho]`. The degree-`k` residual
//! polynomial `T_k((1 - t) / rho) / T_k(1 / rho)` is bounded by
//! `1 / T_k(1 / rho)` there, so the step count that guarantees `eps` is known
//! before the first product and no residual is ever computed.
//!
//! The iterate of degree `k` needs `k - 1` products: the first update is
//! `x_1 = b` and every later update consumes one new residual.
//!
//! Arithmetic per update: `x += d` (`n`), `r -= A d` (`n`, skipped on the last
//! update), the scalar recurrence (3) and `d = a d + b r` (`2n + 2`).

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::CostLedger;
use crate::oracle::LinearOracle;
use crate::vecops::{axpy, norm2};

/// Smallest `k >= 0` with `1 / T_k(1 / rho) <= eps`.
pub fn guaranteed_chebyshev_steps(rho: f64, eps: f64) -> u64 {
    assert!(rho > 0.0 && rho < 1.0, "rho must lie in (0, 1), got {rho}");
    assert!(eps > 0.0, "eps must be positive, got {eps}");
    if eps >= 1.0 {
        return 0;
    }
    let x = 1.0 / rho;
    let target = 1.0 / eps;
    let (mut prev, mut cur) = (1.0f64, x);
    let mut k = 1;
    while cur < target {
        let next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
        k += 1;
    }
    k
}

/// `1 / T_k(1 / rho)`, the guaranteed residual bound after `k` steps.
pub fn chebyshev_residual_bound(rho: f64, k: u64) -> f64 {
    let x = 1.0 / rho;
    let (mut prev, mut cur) = (1.0f64, x);
    if k == 0 {
        return 1.0;
    }
    for _ in 1..k {
        let next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    1.0 / cur
}

/// Outcome of [`chebyshev_solve`]. The residual is guaranteed, not measured.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChebyshevReport {
    pub x: Vec<f64>,
    /// Polynomial degree of the iterate.
    pub steps: usize,
    /// `|b| / T_steps(1 / rho)`: the bound on `|Ax - b|` if the class promise holds.
    pub residual_bound: f64,
    /// Always true: membership in the class cannot be verified from products
    /// alone, so the guarantee rests on the caller's promise.
    pub promise_unchecked: bool,
    pub ledger: CostLedger,
}

impl ChebyshevReport {
    /// The informational condition carried by `promise_unchecked`, as an error value.
    pub fn promise_notice(&self) -> Option<Error> {
        self.promise_unchecked
            .then_some(Error::ClassPromiseUnchecked)
    }
}

/// Runs exactly `guaranteed_chebyshev_steps(rho, eps)` updates from `x_0 = 0`.
pub fn chebyshev_solve(
    oracle: &LinearOracle,
    b: &[f64],
    rho: f64,
    eps: f64,
) -> Result<ChebyshevReport> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(invalid(format!("rho must lie in (0, 1), got {rho}")));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(invalid(format!("eps must be positive, got {eps}")));
    }
    let n = oracle.dim();
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: b.len(),
        });
    }
    let rhs_norm = norm2(b);
    if rhs_norm == 0.0 {
        return Err(Error::ZeroRhs);
    }
    let steps = guaranteed_chebyshev_steps(rho, eps) as usize;
    let mut ledger = CostLedger::new();
    let nn = n as u64;

    // center theta = 1, half-width delta = rho, sigma = theta / delta
    let sigma = 1.0 / rho;
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut d = b.to_vec();
    let mut rho_k = 1.0 / sigma;
    for k in 0..steps {
        axpy(1.0, &d, &mut x);
        ledger.charge_combinatory(nn);
        if k + 1 == steps {
            break;
        }
        let ad = oracle.apply(&d, &mut ledger);
        axpy(-1.0, &ad, &mut r);
        let rho_next = 1.0 / (2.0 * sigma - rho_k);
        let a = rho_next * rho_k;
        let c = 2.0 * rho_next / rho;
        for (di, ri) in d.iter_mut().zip(&r) {
            *di = a * *di + c * ri;
        }
        ledger.charge_combinatory(nn + 3 + 2 * nn + 2);
        rho_k = rho_next;
    }

    Ok(ChebyshevReport {
        x,
        steps,
        residual_bound: rhs_norm * chebyshev_residual_bound(rho, steps as u64),
        promise_unchecked: true,
        ledger,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vecops::sub;

    #[test]
    fn guaranteed_step_examples() {
        assert_eq!(guaranteed_chebyshev_steps(0.5, 1.0), 0);
        assert_eq!(guaranteed_chebyshev_steps(0.5, 0.01), 5);
        assert_eq!(guaranteed_chebyshev_steps(1e-9, 0.01), 1);
        assert!((chebyshev_residual_bound(0.5, 4) - 1.0 / 97.0).abs() < 1e-15);
        assert!((chebyshev_residual_bound(0.5, 5) - 1.0 / 362.0).abs() < 1e-15);
    }

    #[test]
    fn identity_is_solved_by_first_update() {
        let oracle = LinearOracle::diagonal(vec![1.0; 4]);
        let b = [1.0, 0.0, 0.0, 0.0];
        let rep = chebyshev_solve(&oracle, &b, 0.3, 0.01).unwrap();
        assert!(rep.steps >= 1);
        assert_eq!(rep.x, b.to_vec());
        assert!(rep.promise_unchecked);
        assert!(matches!(
            rep.promise_notice(),
            Some(Error::ClassPromiseUnchecked)
        ));
        assert_eq!(rep.ledger.info_count() as usize, rep.steps - 1);
    }

    #[test]
    fn meets_the_guarantee_on_sign_pattern() {
        let n = 40;
        let diag: Vec<f64> = (0..n).map(|i| if i % 2 == 0 { 0.5 } else { 1.5 }).collect();
        let oracle = LinearOracle::diagonal(diag.clone());
        let b: Vec<f64> = (0..n).map(|i| ((i + 1) as f64).sin()).collect();
        let nb = norm2(&b);
        let b: Vec<f64> = b.iter().map(|v| v / nb).collect();
        let rep = chebyshev_solve(&oracle, &b, 0.5, 0.01).unwrap();
        assert_eq!(rep.steps, 5);
        let ax: Vec<f64> = rep.x.iter().zip(&diag).map(|(x, d)| x * d).collect();
        let res = norm2(&sub(&ax, &b));
        assert!(res <= 0.01, "{res}");
        // the extremal spectrum attains the bound
        assert!((res - rep.residual_bound).abs() < 1e-12);
    }
}
