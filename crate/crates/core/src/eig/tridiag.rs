//! Symmetric tridiagonal helpers: Sturm counts, bisection, Ritz pairs, and
//! the banded factorization used by the residual minimizer.

use nalgebra::{DMatrix, SymmetricEigen};

/// Number of eigenvalues of `T` strictly below `x`, from the signs of the
/// `LDL^T` pivots of `T - x I`.
pub fn sturm_count(alpha: &[f64], beta: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut d = 1.0;
    for (i, a) in alpha.iter().enumerate() {
        let off = if i > 0 {
            beta[i - 1] * beta[i - 1] / d
        } else {
            0.0
        };
        d = a - x - off;
        if d == 0.0 {
            d = -f64::EPSILON * (a.abs() + x.abs()).max(f64::MIN_POSITIVE);
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// Gershgorin interval of `T`.
pub fn gershgorin(alpha: &[f64], beta: &[f64]) -> (f64, f64) {
    let k = alpha.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..k {
        let r = if i > 0 { beta[i - 1].abs() } else { 0.0 }
            + if i + 1 < k { beta[i].abs() } else { 0.0 };
        lo = lo.min(alpha[i] - r);
        hi = hi.max(alpha[i] + r);
    }
    (lo, hi)
}

/// Largest eigenvalue of `T` (diagonal `alpha`, off-diagonal `beta[..k-1]`) by
/// bisection. `floor`, when it is a valid lower bound, starts the bracket; the
/// lower end of the final bracket is returned, so the result never falls below it.
pub fn largest_eigenvalue(alpha: &[f64], beta: &[f64], floor: Option<f64>) -> f64 {
    let k = alpha.len();
    assert!(k > 0);
    let (glo, ghi) = gershgorin(alpha, beta);
    let mut lo = match floor {
        Some(f) if f.is_finite() && sturm_count(alpha, beta, f) < k => f.max(glo),
        _ => glo,
    };
    let mut hi = ghi.max(lo);
    let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    while hi - lo > 2.0 * f64::EPSILON * scale {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(alpha, beta, mid) < k {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Ritz values (ascending) and the corresponding unit eigenvectors of `T` as columns.
pub fn ritz_pairs(alpha: &[f64], beta: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
    let k = alpha.len();
    let t = DMatrix::from_fn(k, k, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(t);
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(k, k, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Symmetric positive semidefinite matrix with two sub-diagonals, factored as `L D L^T`.
pub(crate) struct Pentadiagonal {
    pub d0: Vec<f64>,
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
}

impl Pentadiagonal {
    /// `(T - lambda I)^2 + tail^2 e_k e_k^T`.
    pub fn shifted_square(alpha: &[f64], beta: &[f64], lambda: f64, tail: f64) -> Self {
        let k = alpha.len();
        let a: Vec<f64> = alpha.iter().map(|x| x - lambda).collect();
        let b = |i: usize| if i + 1 < k { beta[i] } else { 0.0 };
        let mut d0 = vec![0.0; k];
        let mut d1 = vec![0.0; k.saturating_sub(1)];
        let mut d2 = vec![0.0; k.saturating_sub(2)];
        for i in 0..k {
            let left = if i > 0 { b(i - 1) } else { 0.0 };
            d0[i] = a[i] * a[i] + left * left + b(i) * b(i);
            if i + 1 < k {
                d1[i] = b(i) * (a[i] + a[i + 1]);
            }
            if i + 2 < k {
                d2[i] = b(i) * b(i + 1);
            }
        }
        d0[k - 1] += tail * tail;
        Self { d0, d1, d2 }
    }

    #[cfg(test)]
    /// `y^T P y`.
    pub fn quadratic(&self, y: &[f64]) -> f64 {
        let k = y.len();
        let mut s = 0.0;
        for i in 0..k {
            s += self.d0[i] * y[i] * y[i];
            if i + 1 < k {
                s += 2.0 * self.d1[i] * y[i] * y[i + 1];
            }
            if i + 2 < k {
                s += 2.0 * self.d2[i] * y[i] * y[i + 2];
            }
        }
        s
    }

    /// Solves `(P + shift I) z = y` by banded `L D L^T`; pivots are floored at
    /// `floor` so a singular `P` still yields a (huge) inverse-iteration step.
    pub fn solve_shifted(&self, y: &[f64], shift: f64, floor: f64) -> Vec<f64> {
        let k = y.len();
        let mut d = vec![0.0; k];
        let mut l1 = vec![0.0; k];
        let mut l2 = vec![0.0; k];
        for i in 0..k {
            let mut di = self.d0[i] + shift;
            if i >= 1 {
                // l1[i] = L(i, i-1)
                let mut e = self.d1[i - 1];
                if i >= 2 {
                    e -= l2[i] * d[i - 2] * l1[i - 1];
                }
                l1[i] = e / d[i - 1];
                di -= l1[i] * l1[i] * d[i - 1];
            }
            if i >= 2 {
                di -= l2[i] * l2[i] * d[i - 2];
            }
            d[i] = if di.abs() < floor { floor } else { di };
            if i + 2 < k {
                l2[i + 2] = self.d2[i] / d[i];
            }
        }
        // forward, diagonal, backward
        let mut z = y.to_vec();
        for i in 0..k {
            if i >= 1 {
                z[i] -= l1[i] * z[i - 1];
            }
            if i >= 2 {
                z[i] -= l2[i] * z[i - 2];
            }
        }
        for i in 0..k {
            z[i] /= d[i];
        }
        for i in (0..k).rev() {
            if i + 1 < k {
                z[i] -= l1[i + 1] * z[i + 1];
            }
            if i + 2 < k {
                z[i] -= l2[i + 2] * z[i + 2];
            }
        }
        z
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplace(k: usize) -> (Vec<f64>, Vec<f64>) {
        (vec![2.0; k], vec![-1.0; k - 1])
    }

    #[test]
    fn sturm_and_bisection_match_closed_form() {
        let k = 12;
        let (a, b) = laplace(k);
        let exact =
            |j: usize| 2.0 - 2.0 * (j as f64 * std::f64::consts::PI / (k as f64 + 1.0)).cos();
        assert_eq!(sturm_count(&a, &b, exact(1) - 1e-9), 0);
        assert_eq!(sturm_count(&a, &b, exact(4) + 1e-9), 4);
        let top = largest_eigenvalue(&a, &b, None);
        assert!((top - exact(k)).abs() < 1e-13);
        let top2 = largest_eigenvalue(&a, &b, Some(3.5));
        assert!(top2 >= 3.5 && (top2 - exact(k)).abs() < 1e-13);
        let (vals, _) = ritz_pairs(&a, &b);
        assert!((vals[0] - exact(1)).abs() < 1e-13);
    }

    #[test]
    fn pentadiagonal_solve_matches_dense() {
        let alpha = [0.3, -1.0, 2.0, 0.5, 1.5];
        let beta = [0.7, 0.2, -0.4, 0.9];
        let p = Pentadiagonal::shifted_square(&alpha, &beta, 0.25, 0.6);
        let k = alpha.len();
        let t = DMatrix::from_fn(k, k, |i, j| {
            if i == j {
                alpha[i] - 0.25
            } else if i + 1 == j {
                beta[i]
            } else if j + 1 == i {
                beta[j]
            } else {
                0.0
            }
        });
        let mut dense = &t * &t;
        dense[(k - 1, k - 1)] += 0.36;
        let y = [1.0, -2.0, 0.5, 0.0, 3.0];
        let z = p.solve_shifted(&y, 0.0, 1e-300);
        let back = &dense * nalgebra::DVector::from_column_slice(&z);
        for i in 0..k {
            assert!((back[i] - y[i]).abs() < 1e-10);
        }
        let q = p.quadratic(&y);
        let yv = nalgebra::DVector::from_column_slice(&y);
        assert!((q - yv.dot(&(&dense * &yv))).abs() < 1e-12);
    }
}
