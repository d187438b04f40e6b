use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use ibc_lab::eig::gmr_eig;
use ibc_lab::harness::{
    emit_tables, predict_linear, run_experiment, ExperimentKind, ExperimentParams, ExperimentSpec,
    RunManifest, TableFormat,
};
use ibc_lab::linear::minres_solve;
use ibc_lab::mtx::read_matrix_market;
use ibc_lab::{rng, CostModel, Error, Result};

#[derive(Parser)]
#[command(
    name = "ibc-lab",
    version,
    about = "Cost-model experiments for Krylov solvers, eigenpairs and integration"
)]
struct Cli {
    /// Seed for every random draw of the run.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file (default: stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// JSON file with `seed`, `out`, `format` and `params`; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum, Deserialize)]
#[serde(rename_all = "snake_case")]
enum Format {
    Csv,
    Json,
}

impl From<Format> for TableFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => TableFormat::Csv,
            Format::Json => TableFormat::Json,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Class {
    F1,
    F2,
    Rho,
}

impl Class {
    fn kind(self) -> ExperimentKind {
        match self {
            Class::F1 => ExperimentKind::LinearF1,
            Class::F2 => ExperimentKind::LinearF2,
            Class::Rho => ExperimentKind::LinearRho,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form step counts and complexity bands, no solving.
    Predict {
        #[arg(long, value_enum, default_value = "f1")]
        class: Class,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Minimal residual solves on generated worst-case instances or a Matrix Market file.
    Solve {
        #[arg(long, value_enum, default_value = "f1", conflicts_with = "mtx")]
        class: Class,
        /// Symmetric matrix in Matrix Market coordinate format; the right-hand side is a seeded unit vector.
        #[arg(long)]
        mtx: Option<PathBuf>,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Unspecified eigenpairs by gmr, or randomized largest-eigenvalue estimates.
    Eig {
        /// Randomized Lanczos and power estimates on diag(1..n)/n.
        #[arg(long, conflicts_with = "mtx")]
        random: bool,
        #[arg(long)]
        mtx: Option<PathBuf>,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Average-case integration errors on Brownian-sheet paths.
    Integrate {
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Matrix pair with identical Krylov information and separated largest eigenvalues.
    Adversary {
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Full comparison run of one experiment kind.
    Experiment {
        /// linear_f1, linear_f2, linear_rho, eig_gmr, eig_lanczos_random, integrate_avg or adversary.
        #[arg(required_unless_present = "spec")]
        kind: Option<String>,
        /// JSON experiment spec; explicit flags override its params.
        #[arg(long, conflicts_with = "kind")]
        spec: Option<PathBuf>,
        #[command(flatten)]
        params: ParamArgs,
    },
}

#[derive(Args, Default)]
struct ParamArgs {
    #[arg(long)]
    n: Option<usize>,
    /// Condition-number bound of F1/F2.
    #[arg(long = "m", alias = "M")]
    m: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
    /// Comma-separated tolerances.
    #[arg(long, value_delimiter = ',')]
    eps: Option<Vec<f64>>,
    /// Comma-separated step counts.
    #[arg(long, value_delimiter = ',')]
    k: Option<Vec<usize>>,
    #[arg(long)]
    trials: Option<usize>,
    /// Cost of one information operation (default: n).
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    paths: Option<usize>,
    #[arg(long)]
    grid_m: Option<usize>,
    #[arg(long)]
    mu: Option<f64>,
}

impl ParamArgs {
    fn into_params(self) -> ExperimentParams {
        ExperimentParams {
            n: self.n,
            m: self.m,
            rho: self.rho,
            eps: self.eps,
            k: self.k,
            trials: self.trials,
            seed: None,
            c: self.c,
            d: self.d,
            paths: self.paths,
            grid_m: self.grid_m,
            mu: self.mu,
        }
    }
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    seed: Option<u64>,
    out: Option<PathBuf>,
    format: Option<Format>,
    #[serde(default)]
    params: ExperimentParams,
}

/// Flags, then config file, then built-in defaults.
struct Effective {
    seed: Option<u64>,
    out: Option<PathBuf>,
    format: TableFormat,
    config_params: ExperimentParams,
}

impl Effective {
    fn spec(
        &self,
        kind: ExperimentKind,
        flags: ExperimentParams,
        base: ExperimentParams,
    ) -> ExperimentSpec {
        let mut params = flags.or(&base.or(&self.config_params));
        // deterministic kinds (eig_gmr) ignore the global seed
        if kind.accepts().contains(&"seed") {
            if let Some(seed) = self.seed {
                params.seed = Some(seed);
            }
        }
        ExperimentSpec::new(kind, params)
    }
}

fn load_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let file = File::open(path)
        .map_err(|e| Error::from(e).context(format!("reading {}", path.display())))?;
    serde_json::from_reader(io::BufReader::new(file))
        .map_err(|e| Error::from(e).context(format!("parsing {}", path.display())))
}

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn report(manifest: &RunManifest, eff: &Effective) -> Result<bool> {
    emit_tables(manifest, eff.format, sink(&eff.out)?)?;
    for check in &manifest.checks {
        eprintln!(
            "{} {}: {}",
            if check.pass { "PASS" } else { "FAIL" },
            check.name,
            check.detail
        );
    }
    Ok(manifest.all_pass)
}

/// Rows of a file-based run, in the same CSV/JSON conventions as the tables.
fn emit_rows(eff: &Effective, header: &[&str], rows: Vec<Vec<String>>) -> Result<()> {
    let mut out = sink(&eff.out)?;
    match eff.format {
        TableFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(header)?;
            for row in &rows {
                w.write_record(row)?;
            }
            w.flush()?;
        }
        TableFormat::Json => {
            let objects: Vec<serde_json::Map<String, serde_json::Value>> = rows
                .iter()
                .map(|row| {
                    header
                        .iter()
                        .zip(row)
                        .map(|(h, v)| {
                            let value = v
                                .parse::<f64>()
                                .ok()
                                .and_then(serde_json::Number::from_f64)
                                .map(serde_json::Value::Number)
                                .or_else(|| v.parse::<bool>().ok().map(serde_json::Value::Bool))
                                .unwrap_or_else(|| serde_json::Value::String(v.clone()));
                            (h.to_string(), value)
                        })
                        .collect()
                })
                .collect();
            serde_json::to_writer_pretty(&mut out, &objects)?;
            out.write_all(b"\n")?;
        }
    }
    Ok(())
}

fn file_eps(params: &ExperimentParams) -> Result<Vec<f64>> {
    let eps = params.eps.clone().unwrap_or_else(|| vec![1e-6]);
    if let Some(e) = eps.iter().find(|e| !(**e > 0.0 && **e <= 1.0)) {
        return Err(Error::InvalidSpec(format!(
            "eps must lie in (0, 1], got {e}"
        )));
    }
    Ok(eps)
}

fn solve_file(path: &Path, params: ExperimentParams, eff: &Effective) -> Result<bool> {
    let mm = read_matrix_market(path)?;
    let n = mm.n;
    let oracle = mm.into_oracle();
    let b = rng::unit_sphere(&mut rng::stream(eff.seed.unwrap_or(0), 0), n);
    let model = CostModel::new(params.c.unwrap_or(n as f64))?;
    let mut rows = Vec::new();
    let mut all = true;
    for e in file_eps(&params)? {
        let rep = minres_solve(&oracle, &b, e, params.n.unwrap_or(n).min(n))?;
        all &= rep.converged;
        rows.push(vec![
            n.to_string(),
            format!("{e:.16e}"),
            rep.steps.to_string(),
            rep.converged.to_string(),
            format!("{:.16e}", rep.final_residual),
            rep.ledger.info_count().to_string(),
            rep.ledger.combinatory_count().to_string(),
            format!("{:.16e}", rep.ledger.total(&model)),
        ]);
    }
    let header = [
        "n",
        "eps",
        "steps",
        "converged",
        "final_residual",
        "info_count",
        "combinatory_count",
        "ledger_total",
    ];
    emit_rows(eff, &header, rows)?;
    Ok(all)
}

fn eig_file(path: &Path, params: ExperimentParams, eff: &Effective) -> Result<bool> {
    let mm = read_matrix_market(path)?;
    let n = mm.n;
    let oracle = mm.into_oracle();
    let b = rng::unit_sphere(&mut rng::stream(eff.seed.unwrap_or(0), 0), n);
    let model = CostModel::new(params.c.unwrap_or(n as f64))?;
    let mut rows = Vec::new();
    let mut all = true;
    for e in file_eps(&params)? {
        let rep = gmr_eig(&oracle, &b, e, n)?;
        all &= rep.converged;
        rows.push(vec![
            n.to_string(),
            format!("{e:.16e}"),
            rep.steps.to_string(),
            rep.converged.to_string(),
            format!("{:.16e}", rep.pair.lambda),
            format!("{:.16e}", rep.pair.scaled_residual),
            format!("{:.16e}", rep.norm_used),
            format!("{:.16e}", rep.ledger.total(&model)),
        ]);
    }
    let header = [
        "n",
        "eps",
        "steps",
        "converged",
        "lambda",
        "scaled_residual",
        "norm_used",
        "ledger_total",
    ];
    emit_rows(eff, &header, rows)?;
    Ok(all)
}

fn execute(cli: Cli) -> Result<bool> {
    let config = match &cli.config {
        Some(path) => load_json::<ConfigFile>(path)?,
        None => ConfigFile::default(),
    };
    let eff = Effective {
        seed: cli.seed.or(config.seed),
        out: cli.out.or(config.out),
        format: cli
            .format
            .or(config.format)
            .map(TableFormat::from)
            .unwrap_or_default(),
        config_params: config.params,
    };
    let none = ExperimentParams::default;
    match cli.command {
        Command::Predict { class, params } => {
            let manifest = predict_linear(&eff.spec(class.kind(), params.into_params(), none()))?;
            report(&manifest, &eff)
        }
        Command::Solve { class, mtx, params } => match mtx {
            Some(path) => solve_file(&path, params.into_params().or(&eff.config_params), &eff),
            None => report(
                &run_experiment(&eff.spec(class.kind(), params.into_params(), none()))?,
                &eff,
            ),
        },
        Command::Eig {
            random,
            mtx,
            params,
        } => match mtx {
            Some(path) => eig_file(&path, params.into_params().or(&eff.config_params), &eff),
            None => {
                let kind = if random {
                    ExperimentKind::EigLanczosRandom
                } else {
                    ExperimentKind::EigGmr
                };
                report(
                    &run_experiment(&eff.spec(kind, params.into_params(), none()))?,
                    &eff,
                )
            }
        },
        Command::Integrate { params } => report(
            &run_experiment(&eff.spec(ExperimentKind::IntegrateAvg, params.into_params(), none()))?,
            &eff,
        ),
        Command::Adversary { params } => report(
            &run_experiment(&eff.spec(ExperimentKind::Adversary, params.into_params(), none()))?,
            &eff,
        ),
        Command::Experiment { kind, spec, params } => {
            let (kind, base) = match (kind, spec) {
                (_, Some(path)) => {
                    let s: ExperimentSpec = load_json(&path)?;
                    (s.kind, s.params)
                }
                (Some(name), None) => (name.parse()?, none()),
                (None, None) => unreachable!("clap requires a kind or a spec"),
            };
            report(
                &run_experiment(&eff.spec(kind, params.into_params(), base))?,
                &eff,
            )
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_invalid_input() { 2 } else { 1 })
        }
    }
}
