//! Dense reference for the minimal residual over a Krylov space.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Relative size below which a new Krylov direction counts as dependent.
const DEPENDENCE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BruteForceResidual {
    /// `min |A x - b|` over `x` in the Krylov space actually spanned.
    pub residual: f64,
    /// Dimension of that space.
    pub dimension: usize,
    /// The space has dimension below `k`: it is invariant and the value is
    /// the unconstrained minimum.
    pub degenerate: bool,
}

/// `min |A x - b|` over `x` in `span{b, Ab, ..., A^{k-1} b}` by least squares
/// on an explicitly orthonormalized basis.
pub fn brute_force_min_residual(
    a: &DMatrix<f64>,
    b: &[f64],
    k: usize,
) -> Result<BruteForceResidual> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: a.ncols(),
        });
    }
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: b.len(),
        });
    }
    if k == 0 {
        return Err(invalid("k must be positive"));
    }
    let bv = DVector::from_column_slice(b);
    let bn = bv.norm();
    if bn == 0.0 {
        return Err(Error::ZeroRhs);
    }
    let mut basis: Vec<DVector<f64>> = vec![&bv / bn];
    while basis.len() < k {
        let mut v = a * basis.last().expect("nonempty");
        let scale = v.norm();
        for _ in 0..2 {
            for q in &basis {
                let c = q.dot(&v);
                v.axpy(-c, q, 1.0);
            }
        }
        let norm = v.norm();
        if scale == 0.0 || norm <= DEPENDENCE_TOL * scale {
            break;
        }
        basis.push(v / norm);
    }
    let dimension = basis.len();
    let v = DMatrix::from_columns(&basis);
    let w = a * &v;
    let svd = w.clone().svd(true, true);
    let y = svd.solve(&bv, 1e-14).map_err(|e| invalid(e.to_string()))?;
    let residual = (w * y - &bv).norm();
    Ok(BruteForceResidual {
        residual,
        dimension,
        degenerate: dimension < k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_solved_in_one_dimension() {
        let r =
            brute_force_min_residual(&DMatrix::identity(4, 4), &[0.5, 0.5, 0.5, 0.5], 1).unwrap();
        assert!(r.residual < 1e-15);
        assert!(!r.degenerate);
    }

    #[test]
    fn two_by_two_matches_scalar_scan() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0]));
        let s = 1.0 / 2f64.sqrt();
        let r = brute_force_min_residual(&a, &[s, s], 1).unwrap();
        // x = t b, residual^2 = ((t - 1)^2 + (2t - 1)^2) / 2, minimized at t = 3/5
        let scan = (0..=100_000)
            .map(|i| {
                let t = i as f64 / 100_000.0;
                (((t - 1.0).powi(2) + (2.0 * t - 1.0).powi(2)) / 2.0).sqrt()
            })
            .fold(f64::MAX, f64::min);
        assert!((r.residual - scan).abs() < 1e-9);
        assert!((r.residual - 1.0 / 10f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn flags_invariant_subspace() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0, 3.0]));
        let r = brute_force_min_residual(&a, &[1.0, 1.0, 0.0], 3).unwrap();
        assert!(r.degenerate);
        assert_eq!(r.dimension, 2);
        assert!(r.residual < 1e-14);
    }
}
