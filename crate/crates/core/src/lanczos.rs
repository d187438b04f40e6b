//! Lanczos tridiagonalization over a [`LinearOracle`].
//!
//! The process builds an orthonormal basis `q_1, q_2, ...` of the Krylov
//! spaces `span{b, Ab, ..., A^{k-1} b}` together with the coefficients of the
//! symmetric tridiagonal projection, `A Q_k = Q_{k+1} T~_k`. Each step costs
//! exactly one matrix-vector product.
//!
//! Three-term recurrence arithmetic is charged to the caller's ledger:
//!
//! | step part                   | operations |
//! |-----------------------------|------------|
//! | `alpha = <q_j, A q_j>`      | `n`        |
//! | `w -= alpha q_j`            | `n`        |
//! | `w -= beta_{j-1} q_{j-1}`   | `n` (j > 1)|
//! | `beta = sqrt(<w, w>)`       | `n + 1`    |
//! | `q_{j+1} = w / beta`        | `n + 1` (no breakdown) |
//!
//! A multiply-add pair counts as one operation. Full reorthogonalization
//! (two classical Gram-Schmidt passes) and the symmetry audit are exact-
//! arithmetic no-ops; their floating-point work is tallied separately in
//! [`LanczosProcess::stabilization_ops`].
//!
//! The first reorthogonalization pass doubles as a symmetry check: for a
//! symmetric operator every overlap `<w, q_i>` left after the three-term
//! subtraction vanishes up to rounding.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::CostLedger;
use crate::oracle::LinearOracle;
use crate::vecops::{axpy, dot, norm2, scale};

/// Relative overlap that flags a non-symmetric operator.
pub const SYMMETRY_TOL: f64 = 1e-10;

/// `beta_j <= BREAKDOWN_TOL * |A|_est` is treated as an exact invariant subspace.
pub const BREAKDOWN_TOL: f64 = 1e-12;

/// Stabilized record of Krylov information `[b, Ab, ..., A^k b]`.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct KrylovTrace {
    /// Unit start vector.
    pub b: Vec<f64>,
    /// Orthonormal Lanczos vectors `q_1 .. q_m`.
    pub basis: Vec<Vec<f64>>,
    /// Diagonal of the tridiagonal projection.
    pub alpha: Vec<f64>,
    /// Off-diagonal; `beta[j]` couples `q_{j+1}` and `q_{j+2}` (the last entry couples out of the basis).
    pub beta: Vec<f64>,
    /// Residual norms indexed by step (`[0] = |b| = 1`), filled by solvers that track one.
    pub residual_history: Vec<f64>,
}

impl KrylovTrace {
    /// Largest `|<q_i, q_j> - delta_ij|` over the basis.
    pub fn orthogonality_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, qi) in self.basis.iter().enumerate() {
            for (j, qj) in self.basis.iter().enumerate().skip(i) {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot(qi, qj) - target).abs());
            }
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanczosStep {
    pub alpha: f64,
    pub beta: f64,
    /// The Krylov space became invariant at this step (`beta` is then 0).
    pub breakdown: bool,
}

pub struct LanczosProcess<'a> {
    oracle: &'a LinearOracle,
    b: Vec<f64>,
    basis: Vec<Vec<f64>>,
    images: Vec<Vec<f64>>,
    keep_images: bool,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    norm_estimate: f64,
    worst_asymmetry: f64,
    stabilization_ops: u64,
    exhausted: bool,
}

impl<'a> LanczosProcess<'a> {
    /// Starts from `b / |b|`. With `keep_images` the products `A q_j` are retained
    /// for direct residual recomputation.
    pub fn new(oracle: &'a LinearOracle, b: &[f64], keep_images: bool) -> Result<Self> {
        if b.len() != oracle.dim() {
            return Err(Error::DimensionMismatch {
                expected: oracle.dim(),
                got: b.len(),
            });
        }
        let norm = norm2(b);
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroRhs);
        }
        let mut q = b.to_vec();
        scale(1.0 / norm, &mut q);
        Ok(Self {
            oracle,
            b: q.clone(),
            basis: vec![q],
            images: Vec::new(),
            keep_images,
            alpha: Vec::new(),
            beta: Vec::new(),
            norm_estimate: 0.0,
            worst_asymmetry: 0.0,
            stabilization_ops: 0,
            exhausted: false,
        })
    }

    pub fn dim(&self) -> usize {
        self.oracle.dim()
    }

    /// Completed steps (= matrix-vector products).
    pub fn steps(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_exhausted(&self) -> bool {
        self.exhausted
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    pub fn images(&self) -> &[Vec<f64>] {
        &self.images
    }

    /// Running max of `|A q_j|`, a lower estimate of `|A|`.
    pub fn norm_estimate(&self) -> f64 {
        self.norm_estimate
    }

    pub fn worst_asymmetry(&self) -> f64 {
        self.worst_asymmetry
    }

    pub fn stabilization_ops(&self) -> u64 {
        self.stabilization_ops
    }

    pub(crate) fn add_stabilization_ops(&mut self, ops: u64) {
        self.stabilization_ops += ops;
    }

    /// One Lanczos step: a single charged product plus recurrence arithmetic.
    pub fn step(&mut self, ledger: &mut CostLedger) -> Result<LanczosStep> {
        assert!(!self.exhausted, "Lanczos step after breakdown");
        let n = self.dim() as u64;
        let j = self.alpha.len();
        let qj = &self.basis[j];
        let mut w = self.oracle.apply(qj, ledger);
        let image_norm = norm2(&w);
        self.stabilization_ops += n;
        self.norm_estimate = self.norm_estimate.max(image_norm);
        if self.keep_images {
            self.images.push(w.clone());
        }

        let alpha = dot(qj, &w);
        axpy(-alpha, qj, &mut w);
        ledger.charge_combinatory(2 * n);
        if j > 0 {
            axpy(-self.beta[j - 1], &self.basis[j - 1], &mut w);
            ledger.charge_combinatory(n);
        }

        // pass 1: overlaps left after the recurrence; nonzero only through
        // rounding unless the operator is not symmetric
        let coeffs: Vec<f64> = self.basis.iter().map(|q| dot(q, &w)).collect();
        let scale_ref = self.norm_estimate.max(f64::MIN_POSITIVE);
        let overlap = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs())) / scale_ref;
        self.worst_asymmetry = self.worst_asymmetry.max(overlap);
        if overlap > SYMMETRY_TOL {
            return Err(Error::SymmetryViolation {
                defect: overlap,
                bound: SYMMETRY_TOL,
            });
        }
        for (c, q) in coeffs.iter().zip(&self.basis) {
            axpy(-c, q, &mut w);
        }
        // pass 2
        let coeffs2: Vec<f64> = self.basis.iter().map(|q| dot(q, &w)).collect();
        for (c, q) in coeffs2.iter().zip(&self.basis) {
            axpy(-c, q, &mut w);
        }
        self.stabilization_ops += 4 * (j as u64 + 1) * n;

        let mut beta = norm2(&w);
        ledger.charge_combinatory(n + 1);
        let breakdown =
            beta <= BREAKDOWN_TOL * self.norm_estimate || self.basis.len() == self.dim();
        self.alpha.push(alpha);
        if breakdown {
            beta = 0.0;
            self.beta.push(beta);
            self.exhausted = true;
        } else {
            scale(1.0 / beta, &mut w);
            ledger.charge_combinatory(n + 1);
            self.beta.push(beta);
            self.basis.push(w);
        }
        Ok(LanczosStep {
            alpha,
            beta,
            breakdown,
        })
    }

    /// `sum_j y_j q_j` over the first `y.len()` basis vectors. Not charged.
    pub fn combine(&self, y: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.dim()];
        for (yj, q) in y.iter().zip(&self.basis) {
            axpy(*yj, q, &mut x);
        }
        x
    }

    /// `sum_j y_j A q_j` from retained images. Not charged.
    pub fn combine_images(&self, y: &[f64]) -> Vec<f64> {
        assert!(self.keep_images, "images were not retained");
        let mut x = vec![0.0; self.dim()];
        for (yj, aq) in y.iter().zip(&self.images) {
            axpy(*yj, aq, &mut x);
        }
        x
    }

    pub fn trace(&self, residual_history: Vec<f64>) -> KrylovTrace {
        let k = self.alpha.len();
        KrylovTrace {
            b: self.b.clone(),
            basis: self.basis.iter().take(k.max(1)).cloned().collect(),
            alpha: self.alpha.clone(),
            beta: self.beta.clone(),
            residual_history,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    #[test]
    fn tridiagonalizes_a_diagonal_operator() {
        let diag: Vec<f64> = (1..=20).map(|i| i as f64).collect();
        let oracle = LinearOracle::diagonal(diag.clone());
        let b = vec![1.0; 20];
        let mut lz = LanczosProcess::new(&oracle, &b, false).unwrap();
        let mut ledger = CostLedger::new();
        for _ in 0..10 {
            lz.step(&mut ledger).unwrap();
        }
        assert_eq!(ledger.info_count(), 10);
        let trace = lz.trace(Vec::new());
        assert!(trace.orthogonality_defect() < 1e-12);
        // first coefficient is the Rayleigh quotient of b
        assert!((trace.alpha[0] - 10.5).abs() < 1e-12);
        // recurrence ops: 2n+n+1+n+1 on the first step, 5n+2 afterwards
        let n = 20u64;
        assert_eq!(ledger.combinatory_count(), (4 * n + 2) + 9 * (5 * n + 2));
    }

    #[test]
    fn breaks_down_on_invariant_subspace() {
        let oracle = LinearOracle::diagonal(vec![1.0, 2.0, 3.0]);
        let b = [1.0, 1.0, 1.0];
        let mut lz = LanczosProcess::new(&oracle, &b, false).unwrap();
        let mut ledger = CostLedger::new();
        let mut last = None;
        while !lz.is_exhausted() {
            last = Some(lz.step(&mut ledger).unwrap());
        }
        assert_eq!(lz.steps(), 3);
        assert!(last.unwrap().breakdown);
    }

    #[test]
    fn flags_nonsymmetric_operator() {
        let a = DMatrix::from_row_slice(3, 3, &[2.0, 1.0, 0.0, 0.0, 2.0, 1.0, 0.0, 0.0, 2.0]);
        let oracle = LinearOracle::dense(a).unwrap();
        let mut lz = LanczosProcess::new(&oracle, &[1.0, 0.3, -0.2], false).unwrap();
        let mut ledger = CostLedger::new();
        let outcome = (0..3).try_for_each(|_| lz.step(&mut ledger).map(|_| ()));
        assert!(matches!(outcome, Err(Error::SymmetryViolation { .. })));
    }

    #[test]
    fn rejects_zero_start() {
        let oracle = LinearOracle::diagonal(vec![1.0, 2.0]);
        assert!(matches!(
            LanczosProcess::new(&oracle, &[0.0, 0.0], false),
            Err(Error::ZeroRhs)
        ));
    }
}
