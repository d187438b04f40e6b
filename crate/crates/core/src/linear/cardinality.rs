//! Closed-form Krylov step counts for the condition-number classes and the
//! complexity bands they induce.
//!
//! With `L(eps) = ln((1 + sqrt(1 - eps^2)) / eps) = arccosh(1 / eps)`:
//!
//! * positive definite, `cond(A) <= M`: `min(n, ceil(L / ln((sqrt M + 1) / (sqrt M - 1))))`
//! * invertible, `cond(A) <= M`: `min(n, 2 ceil(L / ln((M + 1) / (M - 1))))`
//!
//! At `M = 1` the denominators vanish; the functions return the limit of the
//! formula as `M -> 1+`, which is one step for the positive definite class and
//! two for the indefinite one (the residual polynomial must vanish at `+1`
//! and `-1`).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linear::MatrixClassSpec;
use crate::model::{ComplexityBand, CostModel};

fn numerator(eps: f64) -> f64 {
    assert!(eps > 0.0, "eps must be positive, got {eps}");
    ((1.0 + (1.0 - eps * eps).sqrt()) / eps).ln()
}

/// Step count of the minimal residual method for positive definite matrices with `cond <= m`.
pub fn cardinality_f1(eps: f64, m: f64, n: u64) -> u64 {
    assert!(m >= 1.0, "condition bound must be >= 1, got {m}");
    if eps >= 1.0 {
        return 0;
    }
    if m == 1.0 {
        return n.min(1);
    }
    let sm = m.sqrt();
    let steps = (numerator(eps) / ((sm + 1.0) / (sm - 1.0)).ln()).ceil();
    n.min(steps as u64)
}

/// Step count of the minimal residual method for invertible matrices with `cond <= m`.
pub fn cardinality_f2(eps: f64, m: f64, n: u64) -> u64 {
    assert!(m >= 1.0, "condition bound must be >= 1, got {m}");
    if eps >= 1.0 {
        return 0;
    }
    if m == 1.0 {
        return n.min(2);
    }
    let half = (numerator(eps) / ((m + 1.0) / (m - 1.0)).ln()).ceil();
    n.min(2 * half as u64)
}

/// Large-`M`, small-`eps` form of [`cardinality_f1`]: `(sqrt M / 2) ln(2 / eps)`.
pub fn asymptotic_f1(eps: f64, m: f64) -> f64 {
    0.5 * m.sqrt() * (2.0 / eps).ln()
}

/// Large-`M`, small-`eps` form of [`cardinality_f2`]: `M ln(2 / eps)`.
pub fn asymptotic_f2(eps: f64, m: f64) -> f64 {
    m * (2.0 / eps).ln()
}

/// Ratio of the two step counts and its asymptotic prediction `1 / (2 sqrt M)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DefinitenessGain {
    pub ratio: f64,
    pub predicted: f64,
    /// False when `n <= 2 M ln(2 / eps) + 3`: the cap at `n` can bind and the
    /// asymptotic prediction is not expected to hold.
    pub in_regime: bool,
}

pub fn positive_definiteness_gain(eps: f64, m: f64, n: u64) -> DefinitenessGain {
    let f1 = cardinality_f1(eps, m, n) as f64;
    let f2 = cardinality_f2(eps, m, n) as f64;
    let ratio = if f2 > 0.0 { f1 / f2 } else { f64::NAN };
    DefinitenessGain {
        ratio,
        predicted: 1.0 / (2.0 * m.sqrt()),
        in_regime: (n as f64) > 2.0 * m * (2.0 / eps).ln() + 3.0,
    }
}

/// Cost band `c a m` with `a` in `[0.5 - 1/m, 1 + 10n/c]`; the lower factor
/// tightens to `1 - 1/m` when `m <= (n - 3) / 2`.
pub fn complexity_band_linear(
    eps: f64,
    class: &MatrixClassSpec,
    model: &CostModel,
    n: u64,
) -> Result<ComplexityBand> {
    let m = match *class {
        MatrixClassSpec::F1 { m } => cardinality_f1(eps, m, n),
        MatrixClassSpec::F2 { m } => cardinality_f2(eps, m, n),
        MatrixClassSpec::Rho { rho } => return Err(Error::UnsupportedClass(format!("Rho({rho})"))),
    };
    if m == 0 {
        return Ok(ComplexityBand {
            lower: 0.0,
            upper: 0.0,
        });
    }
    let c = model.c();
    let mf = m as f64;
    let lower_factor = if mf <= (n as f64 - 3.0) / 2.0 {
        1.0 - 1.0 / mf
    } else {
        0.5 - 1.0 / mf
    };
    let lower = (c * lower_factor * mf).max(0.0);
    let upper = c * (1.0 + 10.0 * n as f64 / c) * mf;
    Ok(ComplexityBand { lower, upper })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn f1_examples() {
        assert_eq!(cardinality_f1(1.0, 100.0, 1000), 0);
        assert_eq!(cardinality_f1(0.01, 100.0, 1000), 27);
        assert!((asymptotic_f1(0.01, 100.0) - 26.49).abs() < 0.01);
        assert_eq!(cardinality_f1(0.01, 100.0, 10), 10);
    }

    #[test]
    fn f2_examples() {
        assert_eq!(cardinality_f2(1.0, 100.0, 1000), 0);
        assert_eq!(cardinality_f2(0.01, 100.0, 1000), 530);
        assert!((asymptotic_f2(0.01, 100.0) - 529.83).abs() < 0.01);
    }

    #[test]
    fn unit_condition_limit() {
        assert_eq!(cardinality_f1(0.01, 1.0, 50), 1);
        assert_eq!(cardinality_f2(0.01, 1.0, 50), 2);
        assert_eq!(cardinality_f2(0.01, 1.0, 1), 1);
        assert_eq!(cardinality_f1(1.0, 1.0, 50), 0);
        // the formula approaches the limit from above
        assert_eq!(cardinality_f1(0.01, 1.0 + 1e-9, 50), 1);
        assert_eq!(cardinality_f2(0.01, 1.0 + 1e-9, 50), 2);
    }

    #[test]
    fn gain_examples() {
        let g = positive_definiteness_gain(0.01, 100.0, 1000);
        assert!((g.ratio - 27.0 / 530.0).abs() < 1e-15);
        assert!((g.ratio - 0.0509).abs() < 1e-4);
        assert_eq!(g.predicted, 0.05);
        assert!(((g.ratio - g.predicted) / g.predicted).abs() < 0.02);
        // 2 M ln(2/eps) + 3 = 1062.7 exceeds n = 1000
        assert!(!g.in_regime);
        assert!(positive_definiteness_gain(0.01, 100.0, 2000).in_regime);
    }

    #[test]
    fn linear_band_examples() {
        let model = CostModel::new(1e6).unwrap();
        let band =
            complexity_band_linear(0.01, &MatrixClassSpec::F1 { m: 100.0 }, &model, 1000).unwrap();
        assert!((band.lower - 2.6e7).abs() < 1e-6);
        assert!((band.upper - 2.727e7).abs() < 1e-6);
        let band =
            complexity_band_linear(1.0, &MatrixClassSpec::F1 { m: 100.0 }, &model, 1000).unwrap();
        assert_eq!((band.lower, band.upper), (0.0, 0.0));
        let rho = complexity_band_linear(0.01, &MatrixClassSpec::Rho { rho: 0.5 }, &model, 1000);
        assert!(matches!(rho, Err(Error::UnsupportedClass(_))));
        // outside the tight regime the lower factor is 0.5 - 1/m
        let band =
            complexity_band_linear(0.01, &MatrixClassSpec::F2 { m: 100.0 }, &model, 1000).unwrap();
        assert!((band.lower - 1e6 * (0.5 * 530.0 - 1.0)).abs() < 1e-3);
    }

    #[test]
    fn linear_band_tightens_as_cost_grows() {
        let class = MatrixClassSpec::F1 { m: 100.0 };
        let spreads: Vec<f64> = [1e4, 1e6, 1e8, 1e10]
            .iter()
            .map(|&c| {
                complexity_band_linear(0.01, &class, &CostModel::new(c).unwrap(), 1000)
                    .unwrap()
                    .spread()
            })
            .collect();
        assert!(spreads.windows(2).all(|w| w[1] < w[0]));
        // the limit is 27/26 since the lower factor is 1 - 1/m
        assert!((spreads[3] - 27.0 / 26.0).abs() < 1e-5);
    }

    proptest! {
        #[test]
        fn formulas_are_monotone(e1 in 1e-6f64..1.0, e2 in 1e-6f64..1.0, m1 in 1.0f64..1e4, m2 in 1.0f64..1e4, n in 1u64..5000) {
            let (elo, ehi) = if e1 < e2 { (e1, e2) } else { (e2, e1) };
            let (mlo, mhi) = if m1 < m2 { (m1, m2) } else { (m2, m1) };
            prop_assert!(cardinality_f1(ehi, mlo, n) <= cardinality_f1(elo, mlo, n));
            prop_assert!(cardinality_f2(ehi, mlo, n) <= cardinality_f2(elo, mlo, n));
            prop_assert!(cardinality_f1(elo, mlo, n) <= cardinality_f1(elo, mhi, n));
            prop_assert!(cardinality_f2(elo, mlo, n) <= cardinality_f2(elo, mhi, n));
            prop_assert!(cardinality_f2(elo, mlo, n) >= cardinality_f1(elo, mlo, n));
        }
    }
}
