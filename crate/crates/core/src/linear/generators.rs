//! Instances that attain the step-count formulas.
//!
//! Positive definite class, target `eps`: the eigenvalues sit at the `k + 1`
//! extremal nodes `x_j = cos(j pi / k)` of the degree-`k` Chebyshev polynomial
//! mapped onto `[1, M]`, with `k` one less than the formula's step count. The
//! start vector has equal weight on every eigenvector, so the weight of a node
//! is its multiplicity, chosen proportional to `delta_j / (sigma + x_j)` with
//! `sigma = (M + 1) / (M - 1)` and `delta_j = 1/2` at the two ends, 1 inside.
//! These are the weights under which the best residual polynomial of degree
//! `k` is the shifted Chebyshev polynomial itself, so the residual after `k`
//! steps is `1 / T_k(sigma)` and the method needs exactly one more step.
//!
//! Indefinite class: the same construction in `lambda^2` on `[1, M^2]`, half
//! the steps, each node mirrored to `+-sqrt`.

use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, Error, Result};
use crate::linear::cardinality::{cardinality_f1, cardinality_f2};
use crate::linear::MatrixClassSpec;
use crate::oracle::{Dense, LinearOracle};
use crate::rng;

/// A generated system: oracle, unit right-hand side and the exact spectrum.
#[derive(Debug, Clone)]
pub struct Instance {
    pub oracle: LinearOracle,
    pub b: Vec<f64>,
    /// Eigenvalues of the hidden operator, in the order of the diagonal form.
    pub eigenvalues: Vec<f64>,
    /// The explicit matrix, when a similarity was applied.
    pub matrix: Option<DMatrix<f64>>,
}

impl Instance {
    pub fn into_parts(self) -> (LinearOracle, Vec<f64>) {
        (self.oracle, self.b)
    }

    /// Explicit matrix of the hidden operator.
    pub fn dense(&self) -> DMatrix<f64> {
        match &self.matrix {
            Some(m) => m.clone(),
            None => DMatrix::from_diagonal(&DVector::from_column_slice(&self.eigenvalues)),
        }
    }
}

/// Tolerance the default worst-case instance is tuned for.
pub const DEFAULT_TARGET_EPS: f64 = 0.01;

/// Worst-case instance tuned for [`DEFAULT_TARGET_EPS`], in diagonal form.
pub fn gen_worst_case_spectrum(class: &MatrixClassSpec, n: usize, seed: u64) -> Result<Instance> {
    gen_worst_case_spectrum_for(class, n, DEFAULT_TARGET_EPS, seed, false)
}

/// Worst-case instance for tolerance `eps`. With `similarity` the diagonal
/// form is conjugated by a Haar orthogonal matrix drawn from `seed`.
pub fn gen_worst_case_spectrum_for(
    class: &MatrixClassSpec,
    n: usize,
    eps: f64,
    seed: u64,
    similarity: bool,
) -> Result<Instance> {
    class.validate()?;
    if n == 0 {
        return Err(invalid("dimension must be positive"));
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(invalid(format!("eps must lie in (0, 1], got {eps}")));
    }
    let eigenvalues = match *class {
        MatrixClassSpec::F1 { m } => f1_spectrum(m, n, eps),
        MatrixClassSpec::F2 { m } => f2_spectrum(m, n, eps),
        MatrixClassSpec::Rho { rho } => {
            return Err(Error::UnsupportedClass(format!(
                "Rho({rho}) has no worst-case generator"
            )))
        }
    };
    let norm = eigenvalues.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let b = vec![1.0 / (n as f64).sqrt(); n];
    Ok(finish(eigenvalues, b, norm, seed, similarity))
}

fn finish(eigenvalues: Vec<f64>, b: Vec<f64>, norm: f64, seed: u64, similarity: bool) -> Instance {
    if !similarity {
        let oracle = LinearOracle::diagonal(eigenvalues.clone()).with_norm_hint(norm);
        return Instance {
            oracle,
            b,
            eigenvalues,
            matrix: None,
        };
    }
    let n = eigenvalues.len();
    let q = rng::random_orthogonal(&mut rng::stream(seed, 0), n);
    let d = DMatrix::from_diagonal(&DVector::from_column_slice(&eigenvalues));
    let mut a = q.transpose() * d * &q;
    // exact symmetry despite rounding in the product
    a = (&a + a.transpose()) * 0.5;
    let qb = q.transpose() * DVector::from_column_slice(&b);
    let oracle = LinearOracle::new(Dense::new(a.clone()).expect("square").with_norm(norm));
    Instance {
        oracle,
        b: qb.as_slice().to_vec(),
        eigenvalues,
        matrix: Some(a),
    }
}

/// Extremal Chebyshev nodes of degree `k` and their worst-case weights for shift `sigma`.
fn lobatto_weights(k: usize, sigma: f64) -> (Vec<f64>, Vec<f64>) {
    if k == 0 {
        return (vec![1.0], vec![1.0]);
    }
    let nodes: Vec<f64> = (0..=k)
        .map(|j| (j as f64 * std::f64::consts::PI / k as f64).cos())
        .collect();
    let weights = nodes
        .iter()
        .enumerate()
        .map(|(j, x)| {
            let end = if j == 0 || j == k { 0.5 } else { 1.0 };
            end / (sigma + x)
        })
        .collect();
    (nodes, weights)
}

/// Integer multiplicities summing to `total`, at least one each, proportional
/// to `weights` by the largest-remainder rule.
fn allocate(weights: &[f64], total: usize) -> Vec<usize> {
    let k = weights.len();
    assert!(total >= k);
    let spare = total - k;
    let sum: f64 = weights.iter().sum();
    let quotas: Vec<f64> = weights.iter().map(|w| w / sum * spare as f64).collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| 1 + q.floor() as usize).collect();
    let mut left = total - counts.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| {
        let ra = quotas[a] - quotas[a].floor();
        let rb = quotas[b] - quotas[b].floor();
        rb.partial_cmp(&ra).expect("finite").then(a.cmp(&b))
    });
    for &i in order.iter().cycle() {
        if left == 0 {
            break;
        }
        counts[i] += 1;
        left -= 1;
    }
    counts
}

fn f1_spectrum(m: f64, n: usize, eps: f64) -> Vec<f64> {
    let steps = cardinality_f1(eps, m, u64::MAX) as usize;
    let k = steps.saturating_sub(1).min(n - 1);
    let sigma = if m > 1.0 {
        (m + 1.0) / (m - 1.0)
    } else {
        f64::INFINITY
    };
    let (nodes, weights) = lobatto_weights(k, sigma);
    let counts = allocate(&weights, n);
    let mut eig = Vec::with_capacity(n);
    for (x, &cnt) in nodes.iter().zip(&counts) {
        let lambda = 0.5 * (m + 1.0) + 0.5 * (m - 1.0) * x;
        eig.extend(std::iter::repeat_n(lambda, cnt));
    }
    eig
}

fn f2_spectrum(m: f64, n: usize, eps: f64) -> Vec<f64> {
    if n == 1 {
        return vec![m];
    }
    let steps = cardinality_f2(eps, m, u64::MAX) as usize;
    let pairs = n / 2;
    let k = (steps / 2).saturating_sub(1).min(pairs - 1);
    let m2 = m * m;
    let sigma = if m > 1.0 {
        (m2 + 1.0) / (m2 - 1.0)
    } else {
        f64::INFINITY
    };
    let (nodes, weights) = lobatto_weights(k, sigma);
    let counts = allocate(&weights, pairs);
    let mut eig = Vec::with_capacity(n);
    for (x, &cnt) in nodes.iter().zip(&counts) {
        let lambda = (0.5 * (m2 + 1.0) + 0.5 * (m2 - 1.0) * x).sqrt();
        for _ in 0..cnt {
            eig.push(lambda);
            eig.push(-lambda);
        }
    }
    if eig.len() < n {
        eig.push(1.0);
    }
    eig
}

/// `A = I - B` with `B` diagonal, `|B| = rho` attained at both ends, the other
/// eigenvalues of `B` uniform in `[-rho, rho]`, and a uniformly random unit `b`.
pub fn gen_rho_instance(rho: f64, n: usize, seed: u64, similarity: bool) -> Result<Instance> {
    MatrixClassSpec::rho(rho)?;
    if n < 2 {
        return Err(invalid("Rho instances need n >= 2"));
    }
    use rand::Rng;
    let mut stream = rng::stream(seed, 1);
    let mut eigenvalues = vec![1.0 - rho, 1.0 + rho];
    eigenvalues.extend((2..n).map(|_| 1.0 - stream.random_range(-rho..=rho)));
    let b = rng::unit_sphere(&mut stream, n);
    Ok(finish(eigenvalues, b, 1.0 + rho, seed, similarity))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linear::minres_solve;

    #[test]
    fn allocation_is_exact() {
        let c = allocate(&[0.5, 1.0, 1.0, 0.5], 11);
        assert_eq!(c.iter().sum::<usize>(), 11);
        assert!(c.iter().all(|&v| v >= 1));
        assert_eq!(allocate(&[1.0, 2.0], 2), vec![1, 1]);
    }

    #[test]
    fn unit_condition_is_identity() {
        let inst = gen_worst_case_spectrum(&MatrixClassSpec::F1 { m: 1.0 }, 2, 3).unwrap();
        assert_eq!(inst.eigenvalues, vec![1.0, 1.0]);
        let rep = minres_solve(&inst.oracle, &inst.b, 1e-12, 10).unwrap();
        assert_eq!(rep.steps, 1);
        let inst =
            gen_worst_case_spectrum_for(&MatrixClassSpec::F1 { m: 1.0 }, 2, 0.01, 3, true).unwrap();
        let rep = minres_solve(&inst.oracle, &inst.b, 1e-12, 10).unwrap();
        assert_eq!(rep.steps, 1);
    }

    #[test]
    fn spectra_respect_the_class() {
        let inst = gen_worst_case_spectrum(&MatrixClassSpec::F1 { m: 100.0 }, 200, 0).unwrap();
        let (lo, hi) = inst
            .eigenvalues
            .iter()
            .fold((f64::MAX, 0.0f64), |(l, h), &v| (l.min(v), h.max(v)));
        assert!((lo - 1.0).abs() < 1e-12 && (hi - 100.0).abs() < 1e-12);
        assert_eq!(inst.eigenvalues.len(), 200);

        let inst = gen_worst_case_spectrum(&MatrixClassSpec::F2 { m: 10.0 }, 401, 0).unwrap();
        assert_eq!(inst.eigenvalues.len(), 401);
        assert!(inst
            .eigenvalues
            .iter()
            .all(|v| v.abs() >= 1.0 - 1e-12 && v.abs() <= 10.0 + 1e-12));

        let inst = gen_rho_instance(0.5, 50, 4, false).unwrap();
        assert!(inst
            .eigenvalues
            .iter()
            .all(|v| (v - 1.0).abs() <= 0.5 + 1e-15));
        assert!(gen_worst_case_spectrum(&MatrixClassSpec::Rho { rho: 0.5 }, 10, 0).is_err());
    }

    #[test]
    fn f1_steps_match_the_formula() {
        let class = MatrixClassSpec::F1 { m: 100.0 };
        let inst = gen_worst_case_spectrum(&class, 200, 0).unwrap();
        let rep = minres_solve(&inst.oracle, &inst.b, 0.01, 200).unwrap();
        assert_eq!(rep.steps as u64, cardinality_f1(0.01, 100.0, 200));
    }
}
