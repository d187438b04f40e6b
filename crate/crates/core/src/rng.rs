//! Seeded random streams.
//!
//! Every random draw in the crate comes from a ChaCha8 generator keyed by a
//! `(seed, stream)` pair, so a trial, path or instance can be replayed in
//! isolation from its index alone.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub type Stream = ChaCha8Rng;

/// Generator for stream `index` under `seed`.
pub fn stream(seed: u64, index: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn gaussian_vector(rng: &mut Stream, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

/// Uniform draw from the unit sphere in `R^n` (normalized isotropic Gaussian).
pub fn unit_sphere(rng: &mut Stream, n: usize) -> Vec<f64> {
    loop {
        let mut v = gaussian_vector(rng, n);
        let norm = crate::vecops::norm2(&v);
        if norm > 0.0 {
            crate::vecops::scale(1.0 / norm, &mut v);
            return v;
        }
    }
}

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the signs
/// of `diag(R)` folded into `Q`.
pub fn random_orthogonal(rng: &mut Stream, n: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| StandardNormal.sample(&mut *rng));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Symmetric matrix with independent Gaussian entries on and above the diagonal.
pub fn random_symmetric(rng: &mut Stream, n: usize) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v: f64 = StandardNormal.sample(&mut *rng);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a = gaussian_vector(&mut stream(7, 0), 5);
        let b = gaussian_vector(&mut stream(7, 0), 5);
        let c = gaussian_vector(&mut stream(7, 1), 5);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn sphere_draws_are_unit() {
        let mut rng = stream(1, 2);
        for _ in 0..10 {
            let v = unit_sphere(&mut rng, 17);
            assert!((crate::vecops::norm2(&v) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn orthogonal_is_orthogonal() {
        let q = random_orthogonal(&mut stream(3, 0), 12);
        let err = (q.transpose() * &q - DMatrix::<f64>::identity(12, 12)).amax();
        assert!(err < 1e-13, "{err}");
    }
}
