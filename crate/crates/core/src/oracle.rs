//! The matrix-vector information channel.
//!
//! Solvers never see a matrix. They see a [`LinearOracle`], and every product
//! `z -> Az` it returns is charged to the caller's ledger as one information
//! operation.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{invalid, Error, Result};
use crate::model::CostLedger;
use crate::rng;
use crate::vecops::{dot, norm2};

/// A symmetric linear map exposed only through its action on vectors.
pub trait SymmetricOperator: Send + Sync {
    fn dim(&self) -> usize;

    /// Writes `A x` into `out`. Both slices have length [`Self::dim`].
    fn apply_into(&self, x: &[f64], out: &mut [f64]);

    /// Known spectral norm, if the constructor knows it.
    fn norm_hint(&self) -> Option<f64> {
        None
    }
}

/// Diagonal operator `diag(d)`.
#[derive(Debug, Clone)]
pub struct Diagonal {
    diag: Vec<f64>,
}

impl Diagonal {
    pub fn new(diag: Vec<f64>) -> Self {
        Self { diag }
    }

    pub fn entries(&self) -> &[f64] {
        &self.diag
    }
}

impl SymmetricOperator for Diagonal {
    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        for ((o, d), xi) in out.iter_mut().zip(&self.diag).zip(x) {
            *o = d * xi;
        }
    }

    fn norm_hint(&self) -> Option<f64> {
        Some(self.diag.iter().fold(0.0f64, |m, d| m.max(d.abs())))
    }
}

/// Explicit dense matrix. Symmetry is the caller's promise.
#[derive(Debug, Clone)]
pub struct Dense {
    matrix: DMatrix<f64>,
    norm: Option<f64>,
}

impl Dense {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                got: matrix.ncols(),
            });
        }
        Ok(Self { matrix, norm: None })
    }

    pub fn with_norm(mut self, norm: f64) -> Self {
        self.norm = Some(norm);
        self
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }
}

impl SymmetricOperator for Dense {
    fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        let n = self.matrix.nrows();
        out.iter_mut().for_each(|o| *o = 0.0);
        // column-major: accumulate column j scaled by x_j
        for (j, xj) in x.iter().enumerate().take(n) {
            if *xj == 0.0 {
                continue;
            }
            let col = self.matrix.column(j);
            for (o, a) in out.iter_mut().zip(col.iter()) {
                *o += a * xj;
            }
        }
    }

    fn norm_hint(&self) -> Option<f64> {
        self.norm
    }
}

/// Compressed sparse row storage of a full (both triangles) square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Csr {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl Csr {
    /// Builds from coordinate triplets; duplicates are summed.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut sorted: Vec<(usize, usize, f64)> = Vec::with_capacity(triplets.len());
        for &(i, j, v) in triplets {
            if i >= n || j >= n {
                return Err(invalid(format!(
                    "entry ({i}, {j}) outside a {n}x{n} matrix"
                )));
            }
            sorted.push((i, j, v));
        }
        sorted.sort_by_key(|t| (t.0, t.1));
        let mut row_ptr = vec![0usize; n + 1];
        let mut col_idx = Vec::with_capacity(sorted.len());
        let mut values: Vec<f64> = Vec::with_capacity(sorted.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in sorted {
            if last == Some((i, j)) {
                *values.last_mut().expect("duplicate follows an entry") += v;
                continue;
            }
            last = Some((i, j));
            row_ptr[i + 1] += 1;
            col_idx.push(j);
            values.push(v);
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Ok(Self {
            n,
            row_ptr,
            col_idx,
            values,
        })
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                m[(i, self.col_idx[p])] += self.values[p];
            }
        }
        m
    }

    /// Largest `|a_ij - a_ji|` over stored entries.
    pub fn asymmetry(&self) -> f64 {
        let dense = self.to_dense();
        (&dense - dense.transpose()).amax()
    }
}

impl SymmetricOperator for Csr {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[p] * x[self.col_idx[p]];
            }
            *o = acc;
        }
    }
}

/// Operator defined by a closure, for instances that have no stored form.
pub struct FnOperator<F> {
    n: usize,
    f: F,
    norm: Option<f64>,
}

impl<F> FnOperator<F>
where
    F: Fn(&[f64], &mut [f64]) + Send + Sync,
{
    pub fn new(n: usize, f: F) -> Self {
        Self { n, f, norm: None }
    }

    pub fn with_norm(mut self, norm: f64) -> Self {
        self.norm = Some(norm);
        self
    }
}

impl<F> SymmetricOperator for FnOperator<F>
where
    F: Fn(&[f64], &mut [f64]) + Send + Sync,
{
    fn dim(&self) -> usize {
        self.n
    }

    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        (self.f)(x, out)
    }

    fn norm_hint(&self) -> Option<f64> {
        self.norm
    }
}

/// Black-box symmetric operator of dimension `n`, reachable only through
/// charged matrix-vector products.
#[derive(Clone)]
pub struct LinearOracle {
    op: Arc<dyn SymmetricOperator>,
    norm_hint: Option<f64>,
}

impl fmt::Debug for LinearOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LinearOracle")
            .field("dim", &self.dim())
            .field("norm_hint", &self.norm_hint)
            .finish()
    }
}

impl LinearOracle {
    pub fn new(op: impl SymmetricOperator + 'static) -> Self {
        let norm_hint = op.norm_hint();
        Self {
            op: Arc::new(op),
            norm_hint,
        }
    }

    pub fn from_arc(op: Arc<dyn SymmetricOperator>) -> Self {
        let norm_hint = op.norm_hint();
        Self { op, norm_hint }
    }

    pub fn diagonal(diag: Vec<f64>) -> Self {
        Self::new(Diagonal::new(diag))
    }

    pub fn dense(matrix: DMatrix<f64>) -> Result<Self> {
        Ok(Self::new(Dense::new(matrix)?))
    }

    pub fn with_norm_hint(mut self, norm: f64) -> Self {
        self.norm_hint = Some(norm);
        self
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn norm_hint(&self) -> Option<f64> {
        self.norm_hint
    }

    /// One information operation: returns `A z` and charges the ledger.
    pub fn apply(&self, z: &[f64], ledger: &mut CostLedger) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.apply_into(z, &mut out, ledger);
        out
    }

    pub fn apply_into(&self, z: &[f64], out: &mut [f64], ledger: &mut CostLedger) {
        assert_eq!(z.len(), self.dim(), "oracle input has the wrong dimension");
        assert_eq!(
            out.len(),
            self.dim(),
            "oracle output has the wrong dimension"
        );
        self.op.apply_into(z, out);
        ledger.charge_info(1);
    }
}

/// Outcome of [`probe_symmetry`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryProbe {
    /// Largest `|<Az, w> - <z, Aw>| / (|Az| |w|)` seen.
    pub worst_defect: f64,
    pub probes: usize,
}

/// Checks `|<Az, w> - <z, Aw>| <= tol * |Az| * |w|` on `probes` random pairs.
///
/// Costs two products per probe, charged to `ledger`; pass a scratch ledger
/// to keep the check out of a solver's accounting.
pub fn probe_symmetry(
    oracle: &LinearOracle,
    probes: usize,
    tol: f64,
    seed: u64,
    ledger: &mut CostLedger,
) -> Result<SymmetryProbe> {
    let n = oracle.dim();
    let mut worst = 0.0f64;
    for p in 0..probes {
        let mut rng = rng::stream(seed, p as u64);
        let z = rng::unit_sphere(&mut rng, n);
        let w = rng::unit_sphere(&mut rng, n);
        let az = oracle.apply(&z, ledger);
        let aw = oracle.apply(&w, ledger);
        let scale = norm2(&az).max(norm2(&aw)) * norm2(&w).max(norm2(&z));
        let defect = (dot(&az, &w) - dot(&z, &aw)).abs();
        let rel = if scale > 0.0 { defect / scale } else { 0.0 };
        worst = worst.max(rel);
        if rel > tol {
            return Err(Error::SymmetryViolation {
                defect: rel,
                bound: tol,
            });
        }
    }
    Ok(SymmetryProbe {
        worst_defect: worst,
        probes,
    })
}
