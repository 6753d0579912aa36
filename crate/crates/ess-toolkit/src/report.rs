//! Experiment reports and their CSV / JSON renderings.
//!
//! Floats are written with 17 significant digits (`{:.16e}`), which
//! round-trips every finite `f64`. Field order is fixed by the struct
//! definitions below.

use std::str::FromStr;

use serde::{Deserialize, Serialize, Serializer};
use serde_json::value::RawValue;

use crate::error::{Result, ToolkitError};
use crate::harness::Mode;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = ToolkitError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(ToolkitError::Config(format!("unknown report format `{other}`"))),
        }
    }
}

pub(crate) fn format_f17(v: f64) -> String {
    format!("{v:.16e}")
}

fn f17<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if !v.is_finite() {
        return s.serialize_none();
    }
    RawValue::from_string(format_f17(*v))
        .map_err(serde::ser::Error::custom)?
        .serialize(s)
}

/// The parameters the report was produced with. Output location, format and
/// thread count are not echoed, so they cannot make two reports differ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub dist: String,
    #[serde(serialize_with = "f17")]
    pub eps: f64,
    #[serde(serialize_with = "f17")]
    pub beta: f64,
    #[serde(serialize_with = "f17")]
    pub gamma: f64,
    pub mode: Mode,
    pub trials: u64,
    pub master_seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub trials: u64,
    pub successes: u64,
    #[serde(serialize_with = "f17")]
    pub success_rate: f64,
    #[serde(serialize_with = "f17")]
    pub estimate_mean: f64,
    #[serde(serialize_with = "f17")]
    pub estimate_min: f64,
    #[serde(serialize_with = "f17")]
    pub estimate_max: f64,
    /// `ess_ε`.
    pub ess_eps: u64,
    /// `ess_{(1+β)ε}`.
    pub ess_relaxed: u64,
    #[serde(serialize_with = "f17")]
    pub band_low: f64,
    #[serde(serialize_with = "f17")]
    pub band_high: f64,
    pub quantile_sample_size: u64,
    pub estimator_sample_size: u64,
    pub total_samp_queries: u64,
    pub total_eval_queries: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial_index: u64,
    pub seed: u64,
    #[serde(serialize_with = "f17")]
    pub estimate: f64,
    #[serde(serialize_with = "f17")]
    pub raw_mean: f64,
    #[serde(serialize_with = "f17")]
    pub band_low: f64,
    #[serde(serialize_with = "f17")]
    pub band_high: f64,
    pub success: bool,
    pub samp_queries: u64,
    pub eval_queries: u64,
    pub wall_time_ns: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ConfigEcho,
    pub summary: Summary,
    pub trials: Vec<TrialRecord>,
}

impl ExperimentReport {
    /// The same report with every timing field zeroed, for determinism
    /// comparisons.
    pub fn without_timing(&self) -> Self {
        let mut r = self.clone();
        r.trials.iter_mut().for_each(|t| t.wall_time_ns = 0);
        r
    }
}

const CSV_HEADER: [&str; 9] = [
    "trial",
    "seed",
    "estimate",
    "raw_mean",
    "band_low",
    "band_high",
    "success",
    "samp_queries",
    "eval_queries",
];

pub fn emit_report(report: &ExperimentReport, format: ReportFormat) -> Result<Vec<u8>> {
    if report.trials.is_empty() {
        return Err(ToolkitError::Config("a report needs at least one trial".into()));
    }
    match format {
        ReportFormat::Csv => emit_csv(report),
        ReportFormat::Json => {
            let mut out = serde_json::to_vec_pretty(report)
                .map_err(|e| ToolkitError::malformed("report", e))?;
            out.push(b'\n');
            Ok(out)
        }
    }
}

fn emit_csv(report: &ExperimentReport) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| ToolkitError::malformed("report", e);
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for t in &report.trials {
        w.write_record([
            t.trial_index.to_string(),
            t.seed.to_string(),
            format_f17(t.estimate),
            format_f17(t.raw_mean),
            format_f17(t.band_low),
            format_f17(t.band_high),
            t.success.to_string(),
            t.samp_queries.to_string(),
            t.eval_queries.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.into_inner()
        .map_err(|e| ToolkitError::malformed("report", e.error()))
}

pub fn parse_json_report(bytes: &[u8]) -> Result<ExperimentReport> {
    serde_json::from_slice(bytes).map_err(|e| ToolkitError::malformed("report", e))
}
