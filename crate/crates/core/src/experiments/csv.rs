//! CSV and metadata emission.
//!
//! Floats are written with Rust's shortest round-trip formatting, so every
//! value parses back to the identical `f64`. Row order follows the record
//! order produced by the runners.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{
    CoveringOutput, CoveringSummary, DofRow, ExperimentOutput, ExperimentSpec, OutageOutput, SummaryRow,
    TrialRecord, WrittenFiles,
};
use crate::error::Result;

pub const RECORD_HEADER: &str = "snr_db,power,pool_size,scheme,trial,r_bob,c_eve,secrecy,r_bob_loss";
pub const SUMMARY_HEADER: &str =
    "snr_db,power,pool_size,scheme,mean_r_bob,mean_c_eve,mean_secrecy,stderr_secrecy";
pub const DOF_HEADER: &str = "scheme,metric,slope,window_points";
pub const OUTAGE_CURVE_HEADER: &str = "r,epsilon";
pub const OUTAGE_RATE_HEADER: &str =
    "snr_db,power,pool_size,scheme,r,mean_r_bob,mean_outage_secrecy,stderr_outage_secrecy";
pub const COVERING_HEADER: &str = "m,rep,delta_c";
pub const COVERING_SUMMARY_HEADER: &str = "m,mean_delta_c,stderr_delta_c";

fn table<T>(header: &str, rows: &[T], mut line: impl FnMut(&mut String, &T)) -> String {
    let mut out = String::with_capacity(header.len() + 1 + rows.len() * 96);
    out.push_str(header);
    out.push('\n');
    for row in rows {
        line(&mut out, row);
        out.push('\n');
    }
    out
}

pub fn records_csv(records: &[TrialRecord]) -> String {
    table(RECORD_HEADER, records, |out, r| {
        let _ = write!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.snr_db, r.power, r.pool_size, r.scheme, r.trial_index, r.r_bob, r.c_eve, r.secrecy, r.r_bob_loss
        );
    })
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    table(SUMMARY_HEADER, rows, |out, r| {
        let _ = write!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.snr_db, r.power, r.pool_size, r.scheme, r.mean_r_bob, r.mean_c_eve, r.mean_secrecy, r.stderr_secrecy
        );
    })
}

pub fn dof_csv(rows: &[DofRow]) -> String {
    table(DOF_HEADER, rows, |out, r| {
        let _ = write!(out, "{},{},{},{}", r.scheme, r.metric, r.slope, r.window_points);
    })
}

pub fn outage_curve_csv(curve: &[(f64, f64)]) -> String {
    table(OUTAGE_CURVE_HEADER, curve, |out, (r, eps)| {
        let _ = write!(out, "{r},{eps}");
    })
}

pub fn outage_rates_csv(output: &OutageOutput) -> String {
    table(OUTAGE_RATE_HEADER, &output.rows, |out, r| {
        let _ = write!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.snr_db,
            r.power,
            r.pool_size,
            r.scheme,
            r.r,
            r.mean_r_bob,
            r.mean_outage_secrecy,
            r.stderr_outage_secrecy
        );
    })
}

pub fn covering_csv(output: &CoveringOutput) -> String {
    table(COVERING_HEADER, &output.rows, |out, r| {
        let _ = write!(out, "{},{},{}", r.m, r.rep, r.estimate);
    })
}

pub fn covering_summary_csv(rows: &[CoveringSummary]) -> String {
    table(COVERING_SUMMARY_HEADER, rows, |out, r| {
        let _ = write!(out, "{},{},{}", r.m, r.mean, r.stderr);
    })
}

/// Writes trial records to `path`.
pub fn write_csv(records: &[TrialRecord], path: &Path) -> Result<()> {
    fs::write(path, records_csv(records))?;
    Ok(())
}

/// `dir/name.csv` -> `dir/name.<suffix>`.
pub fn sidecar_path(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "output".to_string());
    path.with_file_name(format!("{stem}.{suffix}"))
}

#[derive(Serialize)]
struct Metadata<'a> {
    tool: &'static str,
    version: &'static str,
    spec: &'a ExperimentSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    dof: Option<&'a [DofRow]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    outage_r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    covering_log_log_slope: Option<f64>,
}

/// Writes the primary CSV at `path`, the secondary tables next to it, and a
/// `<stem>.meta.json` sidecar echoing the resolved spec.
pub fn write_outputs(spec: &ExperimentSpec, output: &ExperimentOutput, path: &Path) -> Result<WrittenFiles> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    let mut extra = Vec::new();
    let mut emit = |suffix: &str, body: String| -> Result<()> {
        let p = sidecar_path(path, suffix);
        fs::write(&p, body)?;
        extra.push(p);
        Ok(())
    };
    let mut meta = Metadata {
        tool: "ojs",
        version: env!("CARGO_PKG_VERSION"),
        spec,
        dof: None,
        outage_r: None,
        covering_log_log_slope: None,
    };
    match output {
        ExperimentOutput::Sweep(sweep) => {
            write_csv(&sweep.records, path)?;
            emit("summary.csv", summary_csv(&sweep.summary))?;
            emit("dof.csv", dof_csv(&sweep.dof))?;
            meta.dof = Some(&sweep.dof);
        }
        ExperimentOutput::Outage(out) => {
            fs::write(path, outage_curve_csv(&out.curve))?;
            emit("rates.csv", outage_rates_csv(out))?;
            emit("dof.csv", dof_csv(&out.dof))?;
            meta.dof = Some(&out.dof);
            meta.outage_r = Some(out.r);
        }
        ExperimentOutput::Covering(out) => {
            fs::write(path, covering_csv(out))?;
            emit("summary.csv", covering_summary_csv(&out.summary))?;
            meta.covering_log_log_slope = out.log_log_slope;
        }
    }
    let json = serde_json::to_string_pretty(&meta).map_err(|e| crate::error::OjsError::Io(e.to_string()))?;
    emit("meta.json", json + "\n")?;
    Ok(WrittenFiles {
        primary: path.to_path_buf(),
        extra,
    })
}
