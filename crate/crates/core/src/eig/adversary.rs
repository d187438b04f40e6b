//! Two symmetric matrices that share their Krylov information.
//!
//! Given `A1` and a start vector `b`, pick a unit `w` orthogonal to
//! `span{b, A1 b, ..., A1^{k-1} b}` and set `A2 = A1 + mu w w^T`. Then
//! `A2^i b = A1^i b` for `i = 1..=k`, so every method that sees only those
//! products answers identically on both, while `lambda_max(A2) >= mu - |A1|`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rng;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdversaryPair {
    pub a1: DMatrix<f64>,
    pub a2: DMatrix<f64>,
    pub w: Vec<f64>,
    pub lambda_max_1: f64,
    pub lambda_max_2: f64,
    /// `max_i |(A2 - A1) A1^{i-1} b|` over `i = 1..=k`: the two operators
    /// answer every query of the sequence identically when this vanishes.
    /// Iterating `A2` directly would amplify rounding along `w` by about `mu`
    /// per product.
    pub information_defect: f64,
    /// Random draws of `w` rejected for lying too close to the Krylov span.
    pub redraws: usize,
}

impl AdversaryPair {
    pub fn gap(&self) -> f64 {
        self.lambda_max_2 - self.lambda_max_1
    }
}

fn lambda_max(a: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(a.clone()).eigenvalues.max()
}

/// Pair built on a seeded random symmetric `A1` scaled to `|A1| = 1`.
pub fn adversary_pair(n: usize, k: usize, b: &[f64], mu: f64, seed: u64) -> Result<AdversaryPair> {
    if n == 0 {
        return Err(invalid("dimension must be positive"));
    }
    let g = rng::random_symmetric(&mut rng::stream(seed, 0), n);
    let norm = SymmetricEigen::new(g.clone()).eigenvalues.amax();
    let a1 = if norm > 0.0 { g / norm } else { g };
    adversary_pair_with(a1, k, b, mu, seed)
}

/// Pair built on a given symmetric `A1`.
pub fn adversary_pair_with(
    a1: DMatrix<f64>,
    k: usize,
    b: &[f64],
    mu: f64,
    seed: u64,
) -> Result<AdversaryPair> {
    let n = a1.nrows();
    if a1.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: a1.ncols(),
        });
    }
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: b.len(),
        });
    }
    if k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(invalid(format!("mu must be positive, got {mu}")));
    }
    if k >= n {
        return Err(Error::FullKrylov { n });
    }
    let bv = DVector::from_column_slice(b);
    if bv.norm() == 0.0 {
        return Err(Error::ZeroRhs);
    }

    // orthonormal basis of the Krylov span by modified Gram-Schmidt, twice
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let mut v = bv.clone();
    for _ in 0..k {
        let scale = v.norm();
        for _ in 0..2 {
            for q in &basis {
                let c = q.dot(&v);
                v.axpy(-c, q, 1.0);
            }
        }
        let nv = v.norm();
        if scale == 0.0 || nv <= 1e-12 * scale {
            break;
        }
        let q = v / nv;
        v = &a1 * &q;
        basis.push(q);
    }

    let mut stream = rng::stream(seed, 1);
    let mut redraws = 0;
    let w = loop {
        let mut z = DVector::from_vec(rng::gaussian_vector(&mut stream, n));
        let scale = z.norm();
        for _ in 0..2 {
            for q in &basis {
                let c = q.dot(&z);
                z.axpy(-c, q, 1.0);
            }
        }
        let nz = z.norm();
        if nz > 1e-6 * scale {
            break z / nz;
        }
        redraws += 1;
    };

    let a2 = &a1 + mu * &w * w.transpose();
    let mut p = bv;
    let mut defect = 0.0f64;
    for _ in 0..k {
        let next = &a1 * &p;
        defect = defect.max((&a2 * &p - &next).amax());
        p = next;
    }
    Ok(AdversaryPair {
        lambda_max_1: lambda_max(&a1),
        lambda_max_2: lambda_max(&a2),
        a1,
        a2,
        w: w.as_slice().to_vec(),
        information_defect: defect,
        redraws,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_example() {
        let pair = adversary_pair_with(DMatrix::identity(2, 2), 1, &[1.0, 0.0], 5.0, 0).unwrap();
        assert!(pair.w[0].abs() < 1e-15 && (pair.w[1].abs() - 1.0).abs() < 1e-15);
        assert!((pair.lambda_max_2 - 6.0).abs() < 1e-12);
        assert_eq!(pair.information_defect, 0.0);
        assert!(pair.gap() >= 3.0);
    }

    #[test]
    fn seeded_pair_shares_information() {
        let mut b = vec![0.0; 6];
        b[0] = 1.0;
        let pair = adversary_pair(6, 3, &b, 4.0, 17).unwrap();
        assert!(pair.information_defect <= 1e-12);
        assert!(pair.gap() >= 4.0 - 2.0);
        assert!(SymmetricEigen::new(pair.a1.clone()).eigenvalues.amax() <= 1.0 + 1e-12);
    }

    #[test]
    fn full_span_is_rejected() {
        let b = [1.0, 0.0, 0.0];
        assert!(matches!(
            adversary_pair(3, 3, &b, 1.0, 0),
            Err(Error::FullKrylov { n: 3 })
        ));
        assert!(adversary_pair(3, 0, &b, 1.0, 0).is_err());
    }
}
