//! CSV and JSON output of run manifests.
//!
//! Column order is fixed per table and floats carry 17 significant digits,
//! so two replays of a spec produce byte-identical tables.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::manifest::{Records, RunManifest};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableFormat {
    #[default]
    Json,
    Csv,
}

impl std::str::FromStr for TableFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            other => Err(Error::InvalidArgument(format!(
                "unknown format '{other}' (csv or json)"
            ))),
        }
    }
}

pub const LINEAR_COLUMNS: [&str; 10] = [
    "kind",
    "n",
    "M_or_rho",
    "eps",
    "predicted_m",
    "measured_steps",
    "band_lo",
    "band_hi",
    "ledger_total",
    "pass",
];
pub const EIG_COLUMNS: [&str; 10] = [
    "n",
    "eps",
    "gmr_steps",
    "ritz_steps",
    "scaled_residual",
    "band_lo",
    "band_hi",
    "in_regime",
    "ledger_total",
    "pass",
];
pub const LANCZOS_COLUMNS: [&str; 7] = [
    "n",
    "k",
    "trials",
    "lanczos_mean_error",
    "lanczos_std_dev",
    "power_mean_error",
    "bound_shape",
];
pub const INTEGRATION_COLUMNS: [&str; 7] = [
    "d",
    "eps",
    "n",
    "mean_error",
    "stderr",
    "method",
    "seed_base",
];
pub const ADVERSARY_COLUMNS: [&str; 10] = [
    "n",
    "k",
    "mu",
    "information_defect",
    "lambda_max_1",
    "lambda_max_2",
    "gap",
    "estimate_1",
    "estimate_2",
    "pass",
];

fn f(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn optf(x: Option<f64>) -> String {
    x.map(f).unwrap_or_default()
}

/// Header plus one row per record.
pub fn table_rows(records: &Records) -> (Vec<&'static str>, Vec<Vec<String>>) {
    match records {
        Records::Linear(rows) => (
            LINEAR_COLUMNS.to_vec(),
            rows.iter()
                .map(|r| {
                    vec![
                        r.kind.name().to_string(),
                        r.n.to_string(),
                        f(r.m_or_rho),
                        f(r.eps),
                        r.predicted_m.to_string(),
                        opt(r.measured_steps),
                        optf(r.band_lo),
                        optf(r.band_hi),
                        optf(r.ledger_total),
                        opt(r.pass),
                    ]
                })
                .collect(),
        ),
        Records::Eig(rows) => (
            EIG_COLUMNS.to_vec(),
            rows.iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        f(r.eps),
                        r.gmr_steps.to_string(),
                        r.ritz_steps.to_string(),
                        f(r.scaled_residual),
                        f(r.band_lo),
                        f(r.band_hi),
                        r.in_regime.to_string(),
                        f(r.ledger_total),
                        r.pass.to_string(),
                    ]
                })
                .collect(),
        ),
        Records::Lanczos(rows) => (
            LANCZOS_COLUMNS.to_vec(),
            rows.iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        r.k.to_string(),
                        r.trials.to_string(),
                        f(r.lanczos_mean_error),
                        f(r.lanczos_std_dev),
                        f(r.power_mean_error),
                        f(r.bound_shape),
                    ]
                })
                .collect(),
        ),
        Records::Integration(rows) => (
            INTEGRATION_COLUMNS.to_vec(),
            rows.iter()
                .map(|r| {
                    vec![
                        r.d.to_string(),
                        f(r.eps),
                        r.n.to_string(),
                        f(r.mean_error),
                        f(r.stderr),
                        r.method.name().to_string(),
                        r.seed_base.to_string(),
                    ]
                })
                .collect(),
        ),
        Records::Adversary(rows) => (
            ADVERSARY_COLUMNS.to_vec(),
            rows.iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        r.k.to_string(),
                        f(r.mu),
                        f(r.information_defect),
                        f(r.lambda_max_1),
                        f(r.lambda_max_2),
                        f(r.gap),
                        f(r.estimate_1),
                        f(r.estimate_2),
                        r.pass.to_string(),
                    ]
                })
                .collect(),
        ),
    }
}

/// Writes the manifest's table (CSV) or the whole manifest (JSON).
pub fn emit_tables<W: Write>(manifest: &RunManifest, format: TableFormat, out: W) -> Result<()> {
    match format {
        TableFormat::Csv => {
            let (header, rows) = table_rows(&manifest.records);
            let mut w = csv::Writer::from_writer(out);
            w.write_record(&header)?;
            for row in rows {
                w.write_record(&row)?;
            }
            w.flush()?;
        }
        TableFormat::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, manifest)?;
            out.write_all(b"\n")?;
            out.flush()?;
        }
    }
    Ok(())
}

pub fn write_tables(
    manifest: &RunManifest,
    format: TableFormat,
    path: impl AsRef<Path>,
) -> Result<()> {
    emit_tables(manifest, format, BufWriter::new(File::create(path)?))
}

pub fn read_manifest(path: impl AsRef<Path>) -> Result<RunManifest> {
    Ok(serde_json::from_reader(std::io::BufReader::new(
        File::open(path)?,
    ))?)
}
