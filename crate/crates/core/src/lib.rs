//! Matrix-free laboratory for the information-based complexity of large
//! symmetric linear systems, unspecified eigenpairs and average-case
//! multivariate integration.
//!
//! Every problem instance is reachable only through an information channel
//! (matrix-vector products or function evaluations). Each use of that channel
//! is charged to a [`CostLedger`] at cost `c`, and the arithmetic that combines
//! the gathered information is charged at unit cost, so measured costs can be
//! set against closed-form cardinality and complexity predictions.
//!
//! Module map:
//!
//! * [`model`]: cost model, ledgers, tolerance settings and generic complexity bands.
//! * [`oracle`] and [`mtx`]: the matrix-vector information channel and Matrix Market ingestion.
//! * [`linear`]: minimal residual and Chebyshev solvers, cardinality formulas, worst-case generators.
//! * [`eig`]: generalized minimal residual eigenpairs, randomized Lanczos/power estimates, the
//!   equal-information adversary.
//! * [`integrate`]: Hammersley points, the sample-mean rule and Brownian-sheet integrands.
//! * [`harness`]: experiment specs, run manifests and table output used by the CLI.

pub mod eig;
pub mod error;
pub mod harness;
pub mod integrate;
pub mod lanczos;
pub mod linear;
pub mod model;
pub mod mtx;
pub mod oracle;
pub mod rng;
mod vecops;

pub use error::{Error, Result};
pub use model::{ComplexityBand, CostLedger, CostModel, Setting, ToleranceSpec};
pub use oracle::{LinearOracle, SymmetricOperator};
