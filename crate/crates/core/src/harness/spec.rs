//! Experiment specifications and their validation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::defaults::default_params;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    LinearF1,
    LinearF2,
    LinearRho,
    EigGmr,
    EigLanczosRandom,
    IntegrateAvg,
    Adversary,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        Self::LinearF1,
        Self::LinearF2,
        Self::LinearRho,
        Self::EigGmr,
        Self::EigLanczosRandom,
        Self::IntegrateAvg,
        Self::Adversary,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::LinearF1 => "linear_f1",
            Self::LinearF2 => "linear_f2",
            Self::LinearRho => "linear_rho",
            Self::EigGmr => "eig_gmr",
            Self::EigLanczosRandom => "eig_lanczos_random",
            Self::IntegrateAvg => "integrate_avg",
            Self::Adversary => "adversary",
        }
    }

    /// Parameter keys the kind reads; anything else in a spec is rejected.
    pub fn accepts(&self) -> &'static [&'static str] {
        match self {
            Self::LinearF1 | Self::LinearF2 => &["n", "M", "eps", "seed", "c"],
            Self::LinearRho => &["n", "rho", "eps", "trials", "seed", "c"],
            Self::EigGmr => &["n", "eps", "c"],
            Self::EigLanczosRandom => &["n", "k", "trials", "seed", "c"],
            Self::IntegrateAvg => &["d", "eps", "paths", "grid_m", "seed", "c"],
            Self::Adversary => &["n", "k", "mu", "seed"],
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidSpec(format!("unknown experiment kind '{s}'")))
    }
}

/// Key-value parameters. Unset keys fall back to [`default_params`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Condition-number bound of the F1/F2 classes.
    #[serde(default, rename = "M", skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<Vec<usize>>,
    /// Random starts (Lanczos) or seeded instances per eps (Rho).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Cost of one information operation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub paths: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
}

macro_rules! each_param {
    ($mac:ident) => {
        $mac!(n, "n");
        $mac!(m, "M");
        $mac!(rho, "rho");
        $mac!(eps, "eps");
        $mac!(k, "k");
        $mac!(trials, "trials");
        $mac!(seed, "seed");
        $mac!(c, "c");
        $mac!(d, "d");
        $mac!(paths, "paths");
        $mac!(grid_m, "grid_m");
        $mac!(mu, "mu");
    };
}

impl ExperimentParams {
    /// Field-wise: values set in `self` win over `fallback`.
    pub fn or(self, fallback: &ExperimentParams) -> ExperimentParams {
        let mut out = self;
        macro_rules! fill {
            ($f:ident, $key:literal) => {
                if out.$f.is_none() {
                    out.$f = fallback.$f.clone();
                }
            };
        }
        each_param!(fill);
        out
    }

    fn set_keys(&self) -> Vec<&'static str> {
        let mut keys = Vec::new();
        macro_rules! collect {
            ($f:ident, $key:literal) => {
                if self.$f.is_some() {
                    keys.push($key);
                }
            };
        }
        each_param!(collect);
        keys
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    #[serde(default)]
    pub params: ExperimentParams,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidSpec(msg.into())
}

impl ExperimentSpec {
    pub fn new(kind: ExperimentKind, params: ExperimentParams) -> Self {
        Self { kind, params }
    }

    /// Rejects keys the kind does not read, fills defaults and range-checks
    /// every value. The result has every key of the kind set.
    pub fn resolve(&self) -> Result<ExperimentSpec> {
        let accepted = self.kind.accepts();
        if let Some(key) = self
            .params
            .set_keys()
            .into_iter()
            .find(|k| !accepted.contains(k))
        {
            return Err(bad(format!(
                "parameter '{key}' is not used by {}",
                self.kind
            )));
        }
        let mut p = self.params.clone().or(&default_params(self.kind));
        if accepted.contains(&"c") && p.c.is_none() {
            let n = match self.kind {
                ExperimentKind::IntegrateAvg => 1,
                _ => p.n.unwrap_or(1),
            };
            p.c = Some(n.max(1) as f64);
        }
        if self.kind == ExperimentKind::Adversary && p.k.is_none() {
            p.k = Some(vec![p.n.unwrap_or(2).saturating_sub(1)]);
        }
        let spec = ExperimentSpec {
            kind: self.kind,
            params: p,
        };
        spec.check_ranges()?;
        Ok(spec)
    }

    fn check_ranges(&self) -> Result<()> {
        let p = &self.params;
        let kind = self.kind;
        if let Some(n) = p.n {
            let (lo, hi) = match kind {
                ExperimentKind::Adversary => (2, 2000),
                ExperimentKind::LinearF1 | ExperimentKind::LinearF2 | ExperimentKind::LinearRho => {
                    (1, 5000)
                }
                _ => (2, 1_000_000),
            };
            if n < lo || n > hi {
                return Err(bad(format!("n = {n} outside [{lo}, {hi}] for {kind}")));
            }
        }
        if let Some(m) = p.m {
            if !(m.is_finite() && m >= 1.0) {
                return Err(bad(format!("M must be a finite value >= 1, got {m}")));
            }
        }
        if let Some(rho) = p.rho {
            if !(rho > 0.0 && rho < 1.0) {
                return Err(bad(format!("rho must lie in (0, 1), got {rho}")));
            }
        }
        if let Some(eps) = &p.eps {
            if eps.is_empty() {
                return Err(bad("eps list is empty"));
            }
            if let Some(e) = eps.iter().find(|e| !(**e > 0.0 && **e <= 1.0)) {
                return Err(bad(format!("eps must lie in (0, 1], got {e}")));
            }
            if kind == ExperimentKind::IntegrateAvg {
                if let Some(e) = eps.iter().find(|e| **e < 1e-4 || **e >= 1.0) {
                    return Err(bad(format!("eps {e} outside [1e-4, 1) for {kind}")));
                }
            }
        }
        if let Some(ks) = &p.k {
            if ks.is_empty() {
                return Err(bad("k list is empty"));
            }
            let n = p.n.unwrap_or(0);
            let hi = if kind == ExperimentKind::Adversary {
                n.saturating_sub(1)
            } else {
                n
            };
            if let Some(k) = ks.iter().find(|k| **k == 0 || **k > hi) {
                return Err(bad(format!(
                    "k = {k} outside [1, {hi}] for {kind} with n = {n}"
                )));
            }
        }
        if let Some(t) = p.trials {
            if t == 0 || t > 100_000 {
                return Err(bad(format!("trials = {t} outside [1, 100000]")));
            }
        }
        if let Some(c) = p.c {
            if !(c.is_finite() && c > 0.0) {
                return Err(bad(format!("c must be positive, got {c}")));
            }
        }
        if let Some(d) = p.d {
            if !(1..=3).contains(&d) {
                return Err(bad(format!("d = {d} outside [1, 3]")));
            }
        }
        if let Some(paths) = p.paths {
            if !(2..=100_000).contains(&paths) {
                return Err(bad(format!("paths = {paths} outside [2, 100000]")));
            }
        }
        if let Some(g) = p.grid_m {
            if !g.is_power_of_two() || !(2..=4096).contains(&g) {
                return Err(bad(format!(
                    "grid_m = {g} must be a power of two in [2, 4096]"
                )));
            }
            if p.d == Some(3) && g > 256 {
                return Err(bad(format!(
                    "grid_m = {g} too fine for d = 3 (at most 256)"
                )));
            }
        }
        if let Some(mu) = p.mu {
            if !(mu.is_finite() && mu > 0.0) {
                return Err(bad(format!("mu must be positive, got {mu}")));
            }
        }
        Ok(())
    }
}
