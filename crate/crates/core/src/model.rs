//! The model of computation: costed information operations, unit-cost
//! combinatory operations, tolerance settings and the generic bounds that turn
//! an ε-cardinality number into a complexity band.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Prices one information operation at `c` and one combinatory operation at 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostModel {
    c: f64,
}

impl CostModel {
    /// Cost of a single combinatory (arithmetic or comparison) operation.
    pub const COMBINATORY_UNIT: f64 = 1.0;

    pub fn new(c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(invalid(format!(
                "information cost c must be positive, got {c}"
            )));
        }
        Ok(Self { c })
    }

    /// Default pricing for an `n`-dimensional operator: one matvec costs `n`.
    pub fn for_dimension(n: usize) -> Self {
        Self { c: n.max(1) as f64 }
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn combinatory_unit(&self) -> f64 {
        Self::COMBINATORY_UNIT
    }
}

/// Running tally of the operations a single run has performed.
///
/// Counts only ever grow. A ledger belongs to one run; runs that need a
/// combined figure merge finished ledgers with [`CostLedger::absorb`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostLedger {
    info_count: u64,
    combinatory_count: u64,
}

impl CostLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn info_count(&self) -> u64 {
        self.info_count
    }

    pub fn combinatory_count(&self) -> u64 {
        self.combinatory_count
    }

    pub fn charge_info(&mut self, k: u64) {
        self.info_count += k;
    }

    pub fn charge_combinatory(&mut self, k: u64) {
        self.combinatory_count += k;
    }

    /// `c * info_count + combinatory_count`.
    pub fn total(&self, model: &CostModel) -> f64 {
        model.c() * self.info_count as f64
            + model.combinatory_unit() * self.combinatory_count as f64
    }

    /// Adds the counts of a finished phase.
    pub fn absorb(&mut self, other: &CostLedger) {
        self.info_count += other.info_count;
        self.combinatory_count += other.combinatory_count;
    }
}

/// Value-style form of [`CostLedger::charge_info`].
pub fn ledger_charge_info(ledger: CostLedger, k: u64) -> CostLedger {
    let mut out = ledger;
    out.charge_info(k);
    out
}

/// How the error of an algorithm is aggregated over the problem class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Setting {
    WorstCase,
    RandomizedAverage,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceSpec {
    epsilon: f64,
    setting: Setting,
}

impl ToleranceSpec {
    pub fn new(epsilon: f64, setting: Setting) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(invalid(format!(
                "epsilon must lie in (0, 1], got {epsilon}"
            )));
        }
        Ok(Self { epsilon, setting })
    }

    pub fn worst_case(epsilon: f64) -> Result<Self> {
        Self::new(epsilon, Setting::WorstCase)
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn setting(&self) -> Setting {
        self.setting
    }
}

/// Closed interval of cost units that brackets an ε-complexity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexityBand {
    pub lower: f64,
    pub upper: f64,
}

impl ComplexityBand {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(lower >= 0.0 && lower <= upper) {
            return Err(invalid(format!(
                "band requires 0 <= lower <= upper, got [{lower}, {upper}]"
            )));
        }
        Ok(Self { lower, upper })
    }

    pub fn contains(&self, cost: f64) -> bool {
        cost >= self.lower && cost <= self.upper
    }

    /// `upper / lower`, infinite for a degenerate lower bound.
    pub fn spread(&self) -> f64 {
        if self.lower > 0.0 {
            self.upper / self.lower
        } else if self.upper > 0.0 {
            f64::INFINITY
        } else {
            1.0
        }
    }
}

/// `[c * m, (c + 2) * m]`: gathering `m` pieces of information costs at least
/// `c * m`, and an algorithm whose combinatory cost is at most `2m` exists
/// whenever the information is linear.
pub fn complexity_band_generic(m_eps: u64, model: &CostModel) -> ComplexityBand {
    let m = m_eps as f64;
    ComplexityBand {
        lower: model.c() * m,
        upper: (model.c() + 2.0) * m,
    }
}
