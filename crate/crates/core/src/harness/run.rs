//! Experiment execution.
//!
//! Cells (one instance at one eps or k) run concurrently; records are
//! collected in spec order, so the manifest payload depends only on the spec.

use rayon::prelude::*;

use super::defaults::TOLERANCES;
use super::manifest::{
    AdversaryRecord, EigRecord, LanczosRecord, LinearRecord, Records, RunManifest,
};
use super::spec::{ExperimentKind, ExperimentSpec};
use crate::eig::{
    adversary_pair, eig_complexity_band, gen_uniform_spectrum, gmr_eig, lanczos_largest_from,
    lanczos_largest_path, power_largest, ritz_eig, RandomStartSpec,
};
use crate::error::{Error, Result};
use crate::integrate::{error_point, loglog_slope, ErrorPoint, PointMethod};
use crate::linear::{
    cardinality_f1, cardinality_f2, chebyshev_solve, complexity_band_linear, gen_rho_instance,
    gen_worst_case_spectrum_for, guaranteed_chebyshev_steps, minres_solve, MatrixClassSpec,
};
use crate::model::{CostLedger, CostModel};
use crate::oracle::LinearOracle;
use crate::vecops::{norm2, sub};

/// Resolves `spec`, runs every cell and evaluates the embedded checks.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<RunManifest> {
    let spec = spec.resolve()?;
    let mut manifest = RunManifest::new(spec.clone());
    match spec.kind {
        ExperimentKind::LinearF1 | ExperimentKind::LinearF2 => run_linear(&spec, &mut manifest)?,
        ExperimentKind::LinearRho => run_rho(&spec, &mut manifest)?,
        ExperimentKind::EigGmr => run_gmr(&spec, &mut manifest)?,
        ExperimentKind::EigLanczosRandom => run_lanczos(&spec, &mut manifest)?,
        ExperimentKind::IntegrateAvg => run_integrate(&spec, &mut manifest)?,
        ExperimentKind::Adversary => run_adversary(&spec, &mut manifest)?,
    }
    Ok(manifest)
}

/// Step-count predictions alone, without running a solver.
pub fn predict_linear(spec: &ExperimentSpec) -> Result<RunManifest> {
    let spec = spec.resolve()?;
    let p = &spec.params;
    let (n, eps) = (p.n.expect("resolved"), p.eps.clone().expect("resolved"));
    let model = CostModel::new(p.c.expect("resolved"))?;
    let mut rows = Vec::new();
    for e in eps {
        let (param, predicted, band) = match spec.kind {
            ExperimentKind::LinearF1 | ExperimentKind::LinearF2 => {
                let class = class_of(&spec)?;
                let m = p.m.expect("resolved");
                let pred = prediction(&class, e, n);
                (
                    m,
                    pred,
                    Some(complexity_band_linear(e, &class, &model, n as u64)?),
                )
            }
            ExperimentKind::LinearRho => {
                let rho = p.rho.expect("resolved");
                (rho, guaranteed_chebyshev_steps(rho, e), None)
            }
            other => {
                return Err(Error::InvalidSpec(format!(
                    "no step prediction for {other}"
                )))
            }
        };
        rows.push(LinearRecord {
            kind: spec.kind,
            n,
            m_or_rho: param,
            eps: e,
            predicted_m: predicted,
            measured_steps: None,
            band_lo: band.map(|b| b.lower),
            band_hi: band.map(|b| b.upper),
            ledger_total: None,
            pass: None,
        });
    }
    let mut manifest = RunManifest::new(spec);
    manifest.records = Records::Linear(rows);
    Ok(manifest)
}

fn class_of(spec: &ExperimentSpec) -> Result<MatrixClassSpec> {
    let m = spec.params.m.expect("resolved");
    match spec.kind {
        ExperimentKind::LinearF1 => MatrixClassSpec::f1(m),
        ExperimentKind::LinearF2 => MatrixClassSpec::f2(m),
        _ => unreachable!("only F1/F2 carry a condition bound"),
    }
}

fn prediction(class: &MatrixClassSpec, eps: f64, n: usize) -> u64 {
    match *class {
        MatrixClassSpec::F1 { m } => cardinality_f1(eps, m, n as u64),
        MatrixClassSpec::F2 { m } => cardinality_f2(eps, m, n as u64),
        MatrixClassSpec::Rho { .. } => unreachable!(),
    }
}

fn ledger_conforms(ledger: &CostLedger, products: usize, n: usize) -> bool {
    ledger.combinatory_count() <= TOLERANCES.ops_per_step_and_dim * (products * n) as u64
}

fn run_linear(spec: &ExperimentSpec, manifest: &mut RunManifest) -> Result<()> {
    let p = &spec.params;
    let (n, seed) = (p.n.expect("resolved"), p.seed.expect("resolved"));
    let model = CostModel::new(p.c.expect("resolved"))?;
    let class = class_of(spec)?;
    let tol = if spec.kind == ExperimentKind::LinearF1 {
        TOLERANCES.f1_steps
    } else {
        TOLERANCES.f2_steps
    };
    let eps = p.eps.clone().expect("resolved");
    let cells: Vec<(LinearRecord, bool)> = eps
        .par_iter()
        .map(|&e| {
            let ctx = || format!("{} cell eps={e}", spec.kind);
            let inst = gen_worst_case_spectrum_for(&class, n, e, seed, false)
                .map_err(|err| err.context(ctx()))?;
            let rep =
                minres_solve(&inst.oracle, &inst.b, e, n).map_err(|err| err.context(ctx()))?;
            let predicted = prediction(&class, e, n);
            let band = complexity_band_linear(e, &class, &model, n as u64)?;
            let ledger_ok = rep.ledger.info_count() == rep.steps as u64
                && ledger_conforms(&rep.ledger, rep.steps, n);
            let pass = rep.converged
                && ledger_ok
                && (rep.steps as i64 - predicted as i64).unsigned_abs() <= tol;
            let record = LinearRecord {
                kind: spec.kind,
                n,
                m_or_rho: class.parameter(),
                eps: e,
                predicted_m: predicted,
                measured_steps: Some(rep.steps),
                band_lo: Some(band.lower),
                band_hi: Some(band.upper),
                ledger_total: Some(rep.ledger.total(&model)),
                pass: Some(pass),
            };
            Ok((record, ledger_ok))
        })
        .collect::<Result<_>>()?;
    let failing = cells.iter().filter(|c| c.0.pass != Some(true)).count();
    let ledger_ok = cells.iter().all(|c| c.1);
    manifest.push_check(
        format!(
            "{} steps within +-{tol} of the cardinality formula",
            spec.kind
        ),
        failing == 0,
        format!("{failing} of {} cells outside", cells.len()),
    );
    manifest.push_check(
        "ledger conformance",
        ledger_ok,
        format!("{} solves", cells.len()),
    );
    manifest.records = Records::Linear(cells.into_iter().map(|c| c.0).collect());
    Ok(())
}

fn run_rho(spec: &ExperimentSpec, manifest: &mut RunManifest) -> Result<()> {
    let p = &spec.params;
    let (n, seed, rho, trials) = (
        p.n.expect("resolved"),
        p.seed.expect("resolved"),
        p.rho.expect("resolved"),
        p.trials.expect("resolved"),
    );
    let model = CostModel::new(p.c.expect("resolved"))?;
    let eps = p.eps.clone().expect("resolved");
    let cells: Vec<(f64, usize)> = eps
        .iter()
        .flat_map(|&e| (0..trials).map(move |t| (e, t)))
        .collect();
    // (record, chebyshev residual, ledgers conform)
    let out: Vec<(LinearRecord, f64, bool)> = cells
        .par_iter()
        .map(|&(e, t)| {
            let ctx = || format!("linear_rho cell eps={e} instance={t}");
            let inst = gen_rho_instance(rho, n, seed.wrapping_add(t as u64), false)
                .map_err(|err| err.context(ctx()))?;
            let cheb =
                chebyshev_solve(&inst.oracle, &inst.b, rho, e).map_err(|err| err.context(ctx()))?;
            // verification product, outside the run's ledger
            let ax = inst.oracle.apply(&cheb.x, &mut CostLedger::new());
            let cheb_residual = norm2(&sub(&ax, &inst.b)) / norm2(&inst.b);
            let rep =
                minres_solve(&inst.oracle, &inst.b, e, n).map_err(|err| err.context(ctx()))?;
            let predicted = guaranteed_chebyshev_steps(rho, e);
            let ledger_ok = rep.ledger.info_count() == rep.steps as u64
                && ledger_conforms(&rep.ledger, rep.steps, n)
                && cheb.ledger.info_count() as usize + 1 == cheb.steps.max(1)
                && ledger_conforms(&cheb.ledger, cheb.steps, n);
            let pass = rep.converged
                && rep.steps as u64 <= predicted + TOLERANCES.rho_extra_steps
                && cheb_residual <= e
                && ledger_ok;
            let record = LinearRecord {
                kind: spec.kind,
                n,
                m_or_rho: rho,
                eps: e,
                predicted_m: predicted,
                measured_steps: Some(rep.steps),
                band_lo: None,
                band_hi: None,
                ledger_total: Some(rep.ledger.total(&model)),
                pass: Some(pass),
            };
            Ok((record, cheb_residual, ledger_ok))
        })
        .collect::<Result<_>>()?;
    let worst_cheb = out.iter().map(|o| o.1).fold(0.0f64, f64::max);
    let failing = out.iter().filter(|o| o.0.pass != Some(true)).count();
    manifest.push_check(
        "Chebyshev residual within eps and minres within one extra step",
        failing == 0,
        format!(
            "{failing} of {} cells fail; worst Chebyshev residual {worst_cheb:.3e}",
            out.len()
        ),
    );
    manifest.push_check(
        "ledger conformance",
        out.iter().all(|o| o.2),
        format!("{} instances", out.len()),
    );
    manifest.records = Records::Linear(out.into_iter().map(|o| o.0).collect());
    Ok(())
}

fn run_gmr(spec: &ExperimentSpec, manifest: &mut RunManifest) -> Result<()> {
    let p = &spec.params;
    let n = p.n.expect("resolved");
    let c = p.c.expect("resolved");
    let model = CostModel::new(c)?;
    let inst = gen_uniform_spectrum(n)?;
    let eps = p.eps.clone().expect("resolved");
    let rows: Vec<EigRecord> = eps
        .par_iter()
        .map(|&e| {
            let ctx = || format!("eig_gmr cell eps={e}");
            let g = gmr_eig(&inst.oracle, &inst.b, e, n).map_err(|err| err.context(ctx()))?;
            let r = ritz_eig(&inst.oracle, &inst.b, e, n).map_err(|err| err.context(ctx()))?;
            let band = eig_complexity_band(e, &model, n as u64)?;
            let cost = g.steps as f64 * c;
            let pass =
                g.converged && g.steps <= r.steps && (!band.in_regime || band.band.contains(cost));
            Ok(EigRecord {
                n,
                eps: e,
                gmr_steps: g.steps,
                ritz_steps: r.steps,
                scaled_residual: g.pair.scaled_residual,
                band_lo: band.band.lower,
                band_hi: band.band.upper,
                in_regime: band.in_regime,
                ledger_total: g.ledger.total(&model),
                pass,
            })
        })
        .collect::<Result<_>>()?;
    let failing = rows.iter().filter(|r| !r.pass).count();
    manifest.push_check(
        "gmr converges, no later than Ritz, cost inside [c/(4 eps), c/eps]",
        failing == 0,
        format!("{failing} of {} cells fail", rows.len()),
    );
    manifest.records = Records::Eig(rows);
    Ok(())
}

fn run_lanczos(spec: &ExperimentSpec, manifest: &mut RunManifest) -> Result<()> {
    let p = &spec.params;
    let (n, trials, seed) = (
        p.n.expect("resolved"),
        p.trials.expect("resolved"),
        p.seed.expect("resolved"),
    );
    let ks = p.k.clone().expect("resolved");
    let oracle = LinearOracle::diagonal((1..=n).map(|i| i as f64 / n as f64).collect());
    let start = RandomStartSpec::new(seed, trials)?;
    let k_max = *ks.iter().max().expect("non-empty");
    let paths = lanczos_largest_path(&oracle, &start, k_max)?;
    let mut rows = Vec::with_capacity(ks.len());
    let mut dominated = true;
    for &k in &ks {
        let errs: Vec<f64> = paths.iter().map(|path| 1.0 - path[k - 1]).collect();
        let summary = crate::eig::TrialSummary::of(&errs);
        let power = power_largest(&oracle, &start, k)?;
        let power_err = 1.0 - power.summary.mean;
        dominated &= paths
            .iter()
            .zip(&power.estimates)
            .all(|(path, pw)| path[k - 1] >= pw - 1e-12);
        rows.push(LanczosRecord {
            n,
            k,
            trials,
            lanczos_mean_error: summary.mean,
            lanczos_std_dev: summary.std_dev,
            power_mean_error: power_err,
            bound_shape: ((n as f64).ln() / k as f64).powi(2),
        });
    }
    manifest.push_check(
        "Lanczos estimate at least the power estimate in every trial",
        dominated,
        format!("{} values of k, {trials} trials", ks.len()),
    );
    if ks.len() >= 2 {
        let x: Vec<f64> = rows.iter().map(|r| r.k as f64).collect();
        let y: Vec<f64> = rows.iter().map(|r| r.lanczos_mean_error).collect();
        let slope = loglog_slope(&x, &y);
        let w = TOLERANCES.lanczos_slope;
        manifest.push_check(
            format!("mean error log-log slope {} +- {}", w.target, w.half_width),
            w.contains(slope),
            format!("slope {slope:.4}"),
        );
    }
    manifest.records = Records::Lanczos(rows);
    Ok(())
}

fn run_integrate(spec: &ExperimentSpec, manifest: &mut RunManifest) -> Result<()> {
    let p = &spec.params;
    let (d, paths, grid_m, seed) = (
        p.d.expect("resolved"),
        p.paths.expect("resolved"),
        p.grid_m.expect("resolved"),
        p.seed.expect("resolved"),
    );
    let eps = p.eps.clone().expect("resolved");
    let mut rows: Vec<ErrorPoint> = Vec::with_capacity(2 * eps.len());
    for &e in &eps {
        for method in [PointMethod::Hammersley, PointMethod::MonteCarlo] {
            rows.push(
                error_point(d, e, grid_m, paths, seed, method)
                    .map_err(|err| err.context(format!("integrate_avg cell eps={e}")))?,
            );
        }
    }
    let qmc: Vec<&ErrorPoint> = rows
        .iter()
        .filter(|r| r.method == PointMethod::Hammersley)
        .collect();
    let mc: Vec<&ErrorPoint> = rows
        .iter()
        .filter(|r| r.method == PointMethod::MonteCarlo)
        .collect();
    let losses = qmc
        .iter()
        .zip(&mc)
        .filter(|(q, m)| q.n >= TOLERANCES.integration_qmc_from && q.mean_error >= m.mean_error)
        .count();
    manifest.push_check(
        format!(
            "Hammersley below Monte Carlo for n >= {}",
            TOLERANCES.integration_qmc_from
        ),
        losses == 0,
        format!("{losses} losses"),
    );
    if qmc.len() >= 2 {
        let x: Vec<f64> = qmc.iter().map(|r| r.n as f64).collect();
        let y: Vec<f64> = qmc
            .iter()
            .map(|r| r.mean_error / (r.n as f64).ln().powf((d as f64 - 1.0) / 2.0))
            .collect();
        let slope = loglog_slope(&x, &y);
        let w = TOLERANCES.integration_slope;
        manifest.push_check(
            format!("log-corrected error slope {} +- {}", w.target, w.half_width),
            w.contains(slope),
            format!("slope {slope:.4}"),
        );
    }
    manifest.records = Records::Integration(rows);
    Ok(())
}

fn run_adversary(spec: &ExperimentSpec, manifest: &mut RunManifest) -> Result<()> {
    let p = &spec.params;
    let (n, mu, seed) = (
        p.n.expect("resolved"),
        p.mu.expect("resolved"),
        p.seed.expect("resolved"),
    );
    let mut b = vec![0.0; n];
    b[0] = 1.0;
    let tol = TOLERANCES.adversary_information;
    let mut rows = Vec::new();
    for &k in p.k.as_ref().expect("resolved") {
        let pair = adversary_pair(n, k, &b, mu, seed)
            .map_err(|err| err.context(format!("adversary k={k}")))?;
        let e1 = lanczos_largest_from(&LinearOracle::dense(pair.a1.clone())?, &b, k)?;
        let e2 = lanczos_largest_from(&LinearOracle::dense(pair.a2.clone())?, &b, k)?;
        let pass =
            pair.information_defect <= tol && pair.gap() >= mu - 2.0 && (e1 - e2).abs() <= tol;
        rows.push(AdversaryRecord {
            n,
            k,
            mu,
            information_defect: pair.information_defect,
            lambda_max_1: pair.lambda_max_1,
            lambda_max_2: pair.lambda_max_2,
            gap: pair.gap(),
            estimate_1: e1,
            estimate_2: e2,
            pass,
        });
    }
    let failing = rows.iter().filter(|r| !r.pass).count();
    manifest.push_check(
        "identical information, gap >= mu - 2, identical Lanczos estimates",
        failing == 0,
        format!("{failing} of {} cells fail", rows.len()),
    );
    manifest.records = Records::Adversary(rows);
    Ok(())
}
