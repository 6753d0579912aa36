//! Distribution files.
//!
//! CSV: header `label,prob`, one element per row, label a decimal `u64`.
//! JSON: an array of `{"label": int, "prob": float}`. Probabilities are
//! written in shortest round-trip form and re-read bit-exactly.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use ess_core::{DiscreteDistribution, Element};
use serde::{Deserialize, Serialize};

use crate::error::{Result, ToolkitError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DistFormat {
    Csv,
    Json,
}

impl DistFormat {
    /// JSON for a `.json` extension, CSV otherwise.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => DistFormat::Json,
            _ => DistFormat::Csv,
        }
    }
}

impl FromStr for DistFormat {
    type Err = ToolkitError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(DistFormat::Csv),
            "json" => Ok(DistFormat::Json),
            other => Err(ToolkitError::Config(format!("unknown format `{other}`"))),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct Row {
    label: u64,
    prob: f64,
}

const CSV_HEADER: [&str; 2] = ["label", "prob"];

pub fn parse_csv(text: &str, origin: &str) -> Result<DiscreteDistribution> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| ToolkitError::malformed(origin, e))?;
    if headers.iter().ne(CSV_HEADER) {
        return Err(ToolkitError::malformed(
            origin,
            format!("expected header `label,prob`, found `{}`", headers.iter().collect::<Vec<_>>().join(",")),
        ));
    }
    let elements = reader
        .deserialize::<Row>()
        .map(|row| {
            row.map(|r| Element::new(r.label, r.prob))
                .map_err(|e| ToolkitError::malformed(origin, e))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DiscreteDistribution::new(elements)?)
}

pub fn parse_json(text: &str, origin: &str) -> Result<DiscreteDistribution> {
    let rows: Vec<Row> = serde_json::from_str(text).map_err(|e| ToolkitError::malformed(origin, e))?;
    Ok(DiscreteDistribution::new(
        rows.into_iter().map(|r| Element::new(r.label, r.prob)).collect(),
    )?)
}

pub fn parse_distribution(text: &str, format: DistFormat, origin: &str) -> Result<DiscreteDistribution> {
    match format {
        DistFormat::Csv => parse_csv(text, origin),
        DistFormat::Json => parse_json(text, origin),
    }
}

fn rows(dist: &DiscreteDistribution) -> impl Iterator<Item = Row> + '_ {
    dist.elements().iter().map(|e| Row {
        label: e.label.0,
        prob: e.prob,
    })
}

pub fn to_csv(dist: &DiscreteDistribution) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows(dist) {
        writer.serialize(row).expect("writing to memory");
    }
    String::from_utf8(writer.into_inner().expect("writing to memory")).expect("csv output is UTF-8")
}

pub fn to_json(dist: &DiscreteDistribution) -> String {
    serde_json::to_string_pretty(&rows(dist).collect::<Vec<_>>()).expect("rows serialize")
}

pub fn render_distribution(dist: &DiscreteDistribution, format: DistFormat) -> String {
    match format {
        DistFormat::Csv => to_csv(dist),
        DistFormat::Json => to_json(dist),
    }
}

/// Reads a distribution file; the format follows the extension.
pub fn read_distribution(path: &Path) -> Result<DiscreteDistribution> {
    let text = fs::read_to_string(path).map_err(|e| ToolkitError::io(path, e))?;
    parse_distribution(&text, DistFormat::from_path(path), &path.display().to_string())
}

pub fn write_distribution(dist: &DiscreteDistribution, path: &Path, format: DistFormat) -> Result<()> {
    fs::write(path, render_distribution(dist, format)).map_err(|e| ToolkitError::io(path, e))
}
