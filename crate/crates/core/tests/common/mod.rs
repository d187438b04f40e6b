//! Independent reference computations shared by the integration tests.
//!
//! Everything here works on explicit dense matrices and never touches the
//! Lanczos machinery it is used to check.

#![allow(dead_code)]

use ibc_lab::rng;
use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Seeded symmetric Gaussian matrix scaled to spectral norm 1, with a uniform unit start vector.
pub fn random_instance(n: usize, seed: u64) -> (DMatrix<f64>, Vec<f64>) {
    let g = rng::random_symmetric(&mut rng::stream(seed, 0), n);
    let norm = SymmetricEigen::new(g.clone()).eigenvalues.amax();
    let b = rng::unit_sphere(&mut rng::stream(seed, 1), n);
    (g / norm, b)
}

pub fn spectral_norm(a: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(a.clone()).eigenvalues.amax()
}

pub fn lambda_max(a: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(a.clone()).eigenvalues.max()
}

pub fn residual(a: &DMatrix<f64>, x: &[f64], b: &[f64]) -> f64 {
    (a * DVector::from_column_slice(x) - DVector::from_column_slice(b)).norm()
}

/// Orthonormal basis of `span{b, Ab, ..., A^{k-1} b}` (Arnoldi with two
/// Gram-Schmidt passes), truncated at the first dependent direction.
pub fn krylov_basis(a: &DMatrix<f64>, b: &[f64], k: usize) -> DMatrix<f64> {
    let bv = DVector::from_column_slice(b);
    let mut cols: Vec<DVector<f64>> = vec![&bv / bv.norm()];
    while cols.len() < k {
        let mut v = a * cols.last().unwrap();
        let scale = v.norm();
        for _ in 0..2 {
            for q in &cols {
                let c = q.dot(&v);
                v.axpy(-c, q, 1.0);
            }
        }
        if v.norm() <= 1e-10 * scale {
            break;
        }
        let nv = v.norm();
        cols.push(v / nv);
    }
    DMatrix::from_columns(&cols)
}

/// `min_{lambda, |y| = 1} |(A V - lambda V) y|` over an orthonormal `V`.
///
/// For each `lambda` the inner minimum is the smallest singular value of
/// `AV - lambda V`, the square root of the lowest eigenvalue of
/// `W^T W - 2 lambda V^T W + lambda^2 I` with `W = AV`. A grid over the
/// spectral interval locates the candidates and golden-section search
/// refines each local minimum.
pub fn eig_residual_minimum(a: &DMatrix<f64>, v: &DMatrix<f64>) -> f64 {
    let w = a * v;
    let wtw = w.transpose() * &w;
    let h = v.transpose() * &w;
    let k = v.ncols();
    let f = |lambda: f64| -> f64 {
        let g = &wtw - 2.0 * lambda * &h + DMatrix::identity(k, k) * lambda * lambda;
        SymmetricEigen::new(g).eigenvalues.min().max(0.0).sqrt()
    };
    let r = spectral_norm(a) * 1.05;
    let grid = 2000;
    let xs: Vec<f64> = (0..=grid)
        .map(|i| -r + 2.0 * r * i as f64 / grid as f64)
        .collect();
    let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let mut best = ys.iter().copied().fold(f64::INFINITY, f64::min);
    for i in 1..grid {
        if ys[i] <= ys[i - 1] && ys[i] <= ys[i + 1] {
            let (mut lo, mut hi) = (xs[i - 1], xs[i + 1]);
            let phi = (5f64.sqrt() - 1.0) / 2.0;
            let mut c = hi - phi * (hi - lo);
            let mut d = lo + phi * (hi - lo);
            let (mut fc, mut fd) = (f(c), f(d));
            for _ in 0..200 {
                if fc < fd {
                    hi = d;
                    d = c;
                    fd = fc;
                    c = hi - phi * (hi - lo);
                    fc = f(c);
                } else {
                    lo = c;
                    c = d;
                    fc = fd;
                    d = lo + phi * (hi - lo);
                    fd = f(d);
                }
                if hi - lo < 1e-13 {
                    break;
                }
            }
            best = best.min(fc).min(fd);
        }
    }
    best
}
