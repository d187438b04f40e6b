//! Multivariate integration over `[0,1]^d` with function-value information.
//!
//! * [`hammersley_points`]: first coordinate `i/n`, then radical inverses in
//!   the first `d - 1` prime bases.
//! * [`sample_mean_integrate`]: the arithmetic mean of `f` over a point set.
//! * [`brownian_sheet_sample`]: random integrands drawn from a Brownian sheet
//!   on a dyadic grid, for average-case error experiments.
//! * [`wc_cardinality_exponent`] and [`avg_cardinality`]: worst- and
//!   average-case order predictors (constant 1, natural logarithm; order only).

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::CostLedger;
use crate::rng;

/// Bases for coordinates `2..=d`.
pub const PRIMES: [u32; 7] = [2, 3, 5, 7, 11, 13, 17];

/// Largest supported dimension.
pub const MAX_DIM: usize = PRIMES.len() + 1;

/// Van der Corput radical inverse of `i` in `base`: the base-`p` digits of `i`
/// mirrored about the radix point. Accumulated as an exact integer ratio and
/// rounded once.
pub fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = base as u64;
    let mut num: u64 = 0;
    let mut den: u64 = 1;
    while i > 0 {
        num = num * b + i % b;
        den *= b;
        i /= b;
    }
    num as f64 / den as f64
}

/// `n` points in `[0,1)^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    pub d: usize,
    pub points: Vec<Vec<f64>>,
}

impl PointSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Coordinate `axis` of every point.
    pub fn projection(&self, axis: usize) -> Vec<f64> {
        self.points.iter().map(|p| p[axis]).collect()
    }
}

fn check_dim(d: usize) -> Result<()> {
    if d == 0 || d > MAX_DIM {
        return Err(invalid(format!(
            "dimension must lie in 1..={MAX_DIM}, got {d}"
        )));
    }
    Ok(())
}

/// Point `i` is `(i/n, phi_2(i), phi_3(i), phi_5(i), ...)`, `i = 0..n`.
pub fn hammersley_points(n: usize, d: usize) -> Result<PointSet> {
    check_dim(d)?;
    if n == 0 {
        return Err(invalid("point count must be positive"));
    }
    let points = (0..n)
        .map(|i| {
            let mut p = Vec::with_capacity(d);
            p.push(i as f64 / n as f64);
            p.extend(
                PRIMES[..d - 1]
                    .iter()
                    .map(|&b| radical_inverse(i as u64, b)),
            );
            p
        })
        .collect();
    Ok(PointSet { d, points })
}

/// `n` independent uniform points, for Monte Carlo comparison.
pub fn random_points(n: usize, d: usize, seed: u64, stream: u64) -> Result<PointSet> {
    check_dim(d)?;
    let mut g = rng::stream(seed, stream);
    let points = (0..n)
        .map(|_| (0..d).map(|_| g.random::<f64>()).collect())
        .collect();
    Ok(PointSet { d, points })
}

type Evaluator = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Where an integrand came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IntegrandSource {
    Analytic {
        name: String,
    },
    BrownianSheet {
        d: usize,
        grid_m: usize,
        seed: u64,
        truncated: bool,
    },
}

/// A function on `[0,1]^d` reachable only through evaluations.
#[derive(Clone)]
pub struct IntegrandSample {
    pub d: usize,
    pub source: IntegrandSource,
    /// Exact integral, when known.
    pub integral: Option<f64>,
    evaluator: Evaluator,
}

impl fmt::Debug for IntegrandSample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IntegrandSample")
            .field("d", &self.d)
            .field("source", &self.source)
            .field("integral", &self.integral)
            .finish()
    }
}

impl IntegrandSample {
    pub fn analytic(
        name: impl Into<String>,
        d: usize,
        integral: Option<f64>,
        f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            d,
            source: IntegrandSource::Analytic { name: name.into() },
            integral,
            evaluator: Arc::new(f),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.evaluator)(x)
    }
}

/// `n^{-1} sum f(x_i)`: `n` evaluations, `n - 1` additions and one division.
pub fn sample_mean_integrate(f: &IntegrandSample, pts: &PointSet) -> Result<(f64, CostLedger)> {
    if pts.is_empty() {
        return Err(invalid("point set is empty"));
    }
    if pts.d != f.d {
        return Err(Error::DimensionMismatch {
            expected: f.d,
            got: pts.d,
        });
    }
    let mut ledger = CostLedger::new();
    let mut sum = 0.0;
    for p in &pts.points {
        sum += f.eval(p);
    }
    let n = pts.len() as u64;
    ledger.charge_info(n);
    ledger.charge_combinatory(n);
    Ok((sum / n as f64, ledger))
}

/// Exponent `d / r` in `comp(eps) = Theta(c eps^{-d/r})` for the unit ball of
/// `W_p^{r,d}`. Fails when `p r <= d`, where the worst-case cost is infinite.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn wc_cardinality_exponent(r: u32, d: u32, p: f64) -> Result<f64> {
    if r == 0 || d == 0 {
        return Err(invalid("r and d must be positive"));
    }
    if !(p > 1.0) {
        return Err(invalid(format!("p must exceed 1, got {p}")));
    }
    let pr = p * r as f64;
    if pr <= d as f64 {
        return Err(Error::UnsolvableClass { pr, d });
    }
    Ok(d as f64 / r as f64)
}

/// `ceil(eps^{-1} (ln eps^{-1})^{(d-1)/2})`, the average-case point count up to
/// a constant factor.
pub fn avg_cardinality(eps: f64, d: usize) -> u64 {
    assert!(eps > 0.0 && eps < 1.0, "eps must lie in (0, 1), got {eps}");
    let inv = 1.0 / eps;
    (inv * inv.ln().powf((d as f64 - 1.0) / 2.0)).ceil() as u64
}

/// Exact star discrepancy of points in `[0, 1)`:
/// `1/(2n) + max_i |x_(i) - (2i - 1)/(2n)|` over the sorted points.
pub fn star_discrepancy_1d(points: &[f64]) -> f64 {
    let mut x = points.to_vec();
    x.sort_by(f64::total_cmp);
    let n = x.len() as f64;
    let worst = x
        .iter()
        .enumerate()
        .map(|(i, v)| (v - (2.0 * i as f64 + 1.0) / (2.0 * n)).abs())
        .fold(0.0f64, f64::max);
    0.5 / n + worst
}

/// Bound `C_p ln(n) / n` used for the base-`p` van der Corput coordinate,
/// with `C_p = p^2 / (4 (p + 1) ln p) + 1` (the classical leading constant
/// plus one to absorb the `O(1/n)` term for `n >= 16`).
pub fn van_der_corput_discrepancy_bound(p: u32, n: usize) -> f64 {
    let pf = p as f64;
    let c = pf * pf / (4.0 * (pf + 1.0) * pf.ln()) + 1.0;
    c * (n as f64).ln() / n as f64
}

/// Brownian sheet path on the grid `{0, 1/m, ..., 1}^d`, `m` a power of two.
///
/// Node values are built level by level: the value at the corner `(1,...,1)`
/// is standard normal and every dyadic refinement adds, at each new node, the
/// multilinear prediction from the coarser nodes plus an independent normal
/// with the conditional variance of the sheet. The normals for each
/// combination of per-axis levels come from their own random stream, so a
/// finer grid reproduces every node of a coarser one.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BrownianSheet {
    pub d: usize,
    pub m: usize,
    pub seed: u64,
    /// Node values in row-major order over `(m + 1)^d` nodes, last axis fastest.
    pub values: Vec<f64>,
}

/// Finest supported level per axis.
const MAX_LEVEL: u32 = 24;

impl BrownianSheet {
    pub fn generate(d: usize, m: usize, seed: u64) -> Result<Self> {
        if d == 0 || d > 3 {
            return Err(invalid(format!(
                "Brownian sheet dimension must lie in 1..=3, got {d}"
            )));
        }
        if m == 0 || !m.is_power_of_two() || m.trailing_zeros() > MAX_LEVEL {
            return Err(invalid(format!(
                "grid_m must be a power of two up to 2^{MAX_LEVEL}, got {m}"
            )));
        }
        let levels = m.trailing_zeros();
        let side = m + 1;
        let total = side.pow(d as u32);
        let mut values = vec![0.0; total];

        // per-axis positions and standard deviations of each level
        let axis_level = |l: u32| -> (Vec<usize>, f64) {
            if l == 0 {
                (vec![m], 1.0)
            } else {
                let step = m >> l;
                let pos = (0..1usize << (l - 1)).map(|j| (2 * j + 1) * step).collect();
                (pos, 2f64.powf(-(l as f64 + 1.0) / 2.0))
            }
        };
        let mut tuple = vec![0u32; d];
        loop {
            let key = tuple
                .iter()
                .fold(0u64, |acc, &l| acc * (MAX_LEVEL as u64 + 1) + l as u64);
            let mut stream = rng::stream(seed, key);
            let per_axis: Vec<(Vec<usize>, f64)> = tuple.iter().map(|&l| axis_level(l)).collect();
            let sd: f64 = per_axis.iter().map(|a| a.1).product();
            let mut idx = vec![0usize; d];
            'nodes: loop {
                let mut flat = 0;
                for a in 0..d {
                    flat = flat * side + per_axis[a].0[idx[a]];
                }
                let xi: f64 = StandardNormal.sample(&mut stream);
                values[flat] = sd * xi;
                let mut a = d;
                loop {
                    if a == 0 {
                        break 'nodes;
                    }
                    a -= 1;
                    idx[a] += 1;
                    if idx[a] < per_axis[a].0.len() {
                        break;
                    }
                    idx[a] = 0;
                }
            }
            // next level tuple, lexicographic
            let mut a = d;
            loop {
                if a == 0 {
                    break;
                }
                a -= 1;
                tuple[a] += 1;
                if tuple[a] <= levels {
                    break;
                }
                tuple[a] = 0;
                if a == 0 {
                    a = usize::MAX;
                    break;
                }
            }
            if a == usize::MAX {
                break;
            }
        }

        // hierarchical surpluses to node values, one axis at a time
        let stride = |axis: usize| side.pow((d - 1 - axis) as u32);
        for axis in 0..d {
            let s = stride(axis);
            for base in 0..total {
                if (base / s) % side != 0 {
                    continue;
                }
                for l in 1..=levels {
                    let step = m >> l;
                    let mut i = step;
                    while i < m {
                        let left = values[base + (i - step) * s];
                        let right = values[base + (i + step) * s];
                        values[base + i * s] += 0.5 * (left + right);
                        i += 2 * step;
                    }
                }
            }
        }
        Ok(Self { d, m, seed, values })
    }

    fn side(&self) -> usize {
        self.m + 1
    }

    /// Value at grid node `idx` (each entry in `0..=m`).
    pub fn node(&self, idx: &[usize]) -> f64 {
        let side = self.side();
        self.values[idx.iter().fold(0, |acc, &i| acc * side + i)]
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |a, v| a.max(v.abs()))
    }

    /// Rescales to sup-norm 1 when the sup-norm exceeds 1.
    pub fn truncate(&mut self) {
        let s = self.sup_norm();
        if s > 1.0 {
            self.values.iter_mut().for_each(|v| *v /= s);
        }
    }

    /// Multilinear interpolation of the node values.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let d = self.d;
        let side = self.side();
        let mut cell = [0usize; 3];
        let mut frac = [0.0f64; 3];
        for a in 0..d {
            let t = x[a].clamp(0.0, 1.0) * self.m as f64;
            let c = (t.floor() as usize).min(self.m - 1);
            cell[a] = c;
            frac[a] = t - c as f64;
        }
        let mut acc = 0.0;
        for corner in 0..1usize << d {
            let mut w = 1.0;
            let mut flat = 0;
            for a in 0..d {
                let up = (corner >> (d - 1 - a)) & 1;
                w *= if up == 1 { frac[a] } else { 1.0 - frac[a] };
                flat = flat * side + cell[a] + up;
            }
            acc += w * self.values[flat];
        }
        acc
    }

    /// Exact integral of the multilinear interpolant (tensor trapezoid rule).
    pub fn integral(&self) -> f64 {
        let side = self.side();
        let h = 1.0 / self.m as f64;
        let mut acc = 0.0;
        for (flat, v) in self.values.iter().enumerate() {
            let mut w = 1.0;
            let mut rest = flat;
            for _ in 0..self.d {
                let i = rest % side;
                rest /= side;
                w *= if i == 0 || i == self.m { 0.5 * h } else { h };
            }
            acc += w * v;
        }
        acc
    }

    pub fn into_integrand(self, truncated: bool) -> IntegrandSample {
        let source = IntegrandSource::BrownianSheet {
            d: self.d,
            grid_m: self.m,
            seed: self.seed,
            truncated,
        };
        let integral = Some(self.integral());
        let d = self.d;
        IntegrandSample {
            d,
            source,
            integral,
            evaluator: Arc::new(move |x| self.eval(x)),
        }
    }
}

/// Truncated Brownian sheet path as an integrand whose exact integral is known.
pub fn brownian_sheet_sample(d: usize, grid_m: usize, seed: u64) -> Result<IntegrandSample> {
    let mut sheet = BrownianSheet::generate(d, grid_m, seed)?;
    sheet.truncate();
    Ok(sheet.into_integrand(true))
}

/// Point-set construction compared in error experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointMethod {
    Hammersley,
    MonteCarlo,
}

impl PointMethod {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Hammersley => "hammersley",
            Self::MonteCarlo => "monte_carlo",
        }
    }
}

/// Mean absolute error of the sample-mean rule over an ensemble of paths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorPoint {
    pub d: usize,
    pub eps: f64,
    pub n: usize,
    pub mean_error: f64,
    pub stderr: f64,
    pub method: PointMethod,
    pub seed_base: u64,
}

/// Integration errors on `paths` truncated Brownian-sheet paths (path `j`
/// uses seed `seed_base + j`). Monte Carlo draws fresh points per path from
/// stream `(seed_base, j)` under a separate key.
pub fn integration_errors(
    d: usize,
    n: usize,
    grid_m: usize,
    paths: usize,
    seed_base: u64,
    method: PointMethod,
) -> Result<Vec<f64>> {
    if paths == 0 {
        return Err(invalid("need at least one path"));
    }
    let hammersley = hammersley_points(n, d)?;
    (0..paths)
        .into_par_iter()
        .map(|j| {
            let f = brownian_sheet_sample(d, grid_m, seed_base.wrapping_add(j as u64))?;
            let pts = match method {
                PointMethod::Hammersley => hammersley.clone(),
                PointMethod::MonteCarlo => {
                    random_points(n, d, seed_base ^ 0x005e_ed0f_4a11, j as u64)?
                }
            };
            let (est, _) = sample_mean_integrate(&f, &pts)?;
            Ok((est - f.integral.expect("sheet integral is exact")).abs())
        })
        .collect()
}

/// Mean and standard error of the errors at `n = avg_cardinality(eps, d)`.
pub fn error_point(
    d: usize,
    eps: f64,
    grid_m: usize,
    paths: usize,
    seed_base: u64,
    method: PointMethod,
) -> Result<ErrorPoint> {
    let n = avg_cardinality(eps, d) as usize;
    let errs = integration_errors(d, n, grid_m, paths, seed_base, method)?;
    let k = errs.len() as f64;
    let mean = errs.iter().sum::<f64>() / k;
    let var = errs.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (k - 1.0).max(1.0);
    Ok(ErrorPoint {
        d,
        eps,
        n,
        mean_error: mean,
        stderr: (var / k).sqrt(),
        method,
        seed_base,
    })
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radical_inverse_values() {
        assert_eq!(radical_inverse(0, 2), 0.0);
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(2, 2), 0.25);
        assert_eq!(radical_inverse(3, 2), 0.75);
        assert_eq!(radical_inverse(6, 2), 0.375);
        assert_eq!(radical_inverse(1, 3), 1.0 / 3.0);
        assert_eq!(radical_inverse(5, 3), 7.0 / 9.0);
    }

    #[test]
    fn hammersley_examples() {
        let p = hammersley_points(4, 2).unwrap();
        assert_eq!(
            p.points,
            vec![
                vec![0.0, 0.0],
                vec![0.25, 0.5],
                vec![0.5, 0.25],
                vec![0.75, 0.75]
            ]
        );
        let p = hammersley_points(5, 1).unwrap();
        assert_eq!(p.projection(0), vec![0.0, 0.2, 0.4, 0.6, 0.8]);
        let p = hammersley_points(3, 3).unwrap();
        assert_eq!(p.projection(2), vec![0.0, 1.0 / 3.0, 2.0 / 3.0]);
        assert!(hammersley_points(4, 9).is_err());
        assert!(hammersley_points(0, 2).is_err());
        let p = hammersley_points(1000, 8).unwrap();
        assert!(p.points.iter().flatten().all(|v| (0.0..1.0).contains(v)));
        assert!(p
            .points
            .iter()
            .enumerate()
            .all(|(i, x)| x[0] == i as f64 / 1000.0));
    }

    #[test]
    fn sample_mean_examples() {
        let pts = hammersley_points(4, 2).unwrap();
        let one = IntegrandSample::analytic("one", 2, Some(1.0), |_| 1.0);
        assert_eq!(sample_mean_integrate(&one, &pts).unwrap().0, 1.0);
        let sum = IntegrandSample::analytic("x+y", 2, Some(1.0), |x| x[0] + x[1]);
        let (est, ledger) = sample_mean_integrate(&sum, &pts).unwrap();
        assert_eq!(est, 0.75);
        assert_eq!((ledger.info_count(), ledger.combinatory_count()), (4, 4));
        let id = IntegrandSample::analytic("x", 1, Some(0.5), |x| x[0]);
        let n = 1000;
        let (est, _) = sample_mean_integrate(&id, &hammersley_points(n, 1).unwrap()).unwrap();
        assert!((est - (n as f64 - 1.0) / (2.0 * n as f64)).abs() < 1e-15);
        assert!(sample_mean_integrate(&id, &pts).is_err());
    }

    #[test]
    fn exponent_and_cardinality_examples() {
        assert_eq!(wc_cardinality_exponent(1, 2, 3.0).unwrap(), 2.0);
        assert_eq!(wc_cardinality_exponent(4, 4, 2.0).unwrap(), 1.0);
        assert_eq!(wc_cardinality_exponent(2, 3, f64::INFINITY).unwrap(), 1.5);
        assert!(matches!(
            wc_cardinality_exponent(1, 2, 2.0),
            Err(Error::UnsolvableClass { .. })
        ));
        assert_eq!(avg_cardinality(0.01, 1), 100);
        assert_eq!(avg_cardinality(0.01, 3), 461);
        for d in 1..8 {
            assert!(avg_cardinality(0.1, d + 1) >= avg_cardinality(0.1, d));
        }
    }

    #[test]
    fn star_discrepancy_of_equispaced_points() {
        let n = 10;
        let mid: Vec<f64> = (0..n)
            .map(|i| (2 * i + 1) as f64 / (2 * n) as f64)
            .collect();
        assert!((star_discrepancy_1d(&mid) - 0.05).abs() < 1e-15);
        let left: Vec<f64> = (0..n).map(|i| i as f64 / n as f64).collect();
        assert!((star_discrepancy_1d(&left) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn sheet_is_pinned_and_nested() {
        for seed in 0..5 {
            let coarse = BrownianSheet::generate(2, 8, seed).unwrap();
            let fine = BrownianSheet::generate(2, 32, seed).unwrap();
            assert_eq!(coarse.eval(&[0.0, 0.0]), 0.0);
            assert_eq!(coarse.node(&[0, 5]), 0.0);
            for i in 0..=8 {
                for j in 0..=8 {
                    assert_eq!(coarse.node(&[i, j]), fine.node(&[4 * i, 4 * j]));
                }
            }
            let one = BrownianSheet::generate(1, 4, seed).unwrap();
            let two = BrownianSheet::generate(1, 64, seed).unwrap();
            assert_eq!(one.node(&[4]), two.node(&[64]));
        }
        assert!(BrownianSheet::generate(2, 12, 0).is_err());
        assert!(BrownianSheet::generate(4, 8, 0).is_err());
    }

    #[test]
    fn sheet_integral_matches_interpolant() {
        let sheet = BrownianSheet::generate(2, 16, 3).unwrap();
        // midpoint rule on a fine grid converges to the exact interpolant integral
        let k = 400;
        let mut acc = 0.0;
        for i in 0..k {
            for j in 0..k {
                acc += sheet.eval(&[(i as f64 + 0.5) / k as f64, (j as f64 + 0.5) / k as f64]);
            }
        }
        assert!((acc / (k * k) as f64 - sheet.integral()).abs() < 1e-4);
        let f = brownian_sheet_sample(2, 16, 3).unwrap();
        assert!(f.eval(&[0.3, 0.9]).abs() <= 1.0);
    }

    #[test]
    fn loglog_slope_recovers_power() {
        let x = [1.0, 2.0, 4.0, 8.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(-1.5)).collect();
        assert!((loglog_slope(&x, &y) + 1.5).abs() < 1e-12);
    }
}
