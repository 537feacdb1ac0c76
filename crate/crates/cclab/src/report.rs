//! Report rows and their CSV / JSON encodings.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::Format;
use crate::error::{CliError, Result};

pub const COLUMNS: [&str; 11] = [
    "scenario_id",
    "check",
    "subcase",
    "lhs",
    "rhs_canonical",
    "rhs_variant",
    "slack",
    "holds",
    "equality",
    "equality_case",
    "seed",
];

/// Subcase suffix marking rows outside a bound's hypotheses; such rows do
/// not affect the exit status.
pub const INFORMATIONAL: &str = ":informational";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Row {
    pub scenario_id: String,
    pub check: String,
    pub subcase: String,
    pub lhs: f64,
    pub rhs_canonical: f64,
    pub rhs_variant: Option<f64>,
    pub slack: f64,
    pub holds: bool,
    pub equality: bool,
    pub equality_case: String,
    pub seed: u64,
}

impl Row {
    pub fn asserted(&self) -> bool {
        !self.subcase.ends_with(INFORMATIONAL)
    }

    pub fn violated(&self) -> bool {
        self.asserted() && !self.holds
    }
}

/// 17 significant digits.
pub fn format_real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

pub fn sort_rows(rows: &mut [Row]) {
    rows.sort_by(|a, b| {
        (a.scenario_id.as_str(), a.check.as_str(), a.subcase.as_str()).cmp(&(
            b.scenario_id.as_str(),
            b.check.as_str(),
            b.subcase.as_str(),
        ))
    });
}

pub fn write_csv<W: Write>(rows: &[Row], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let enc = |e: csv::Error| CliError::Encode(e.to_string());
    w.write_record(COLUMNS).map_err(enc)?;
    for r in rows {
        w.write_record([
            r.scenario_id.clone(),
            r.check.clone(),
            r.subcase.clone(),
            format_real(r.lhs),
            format_real(r.rhs_canonical),
            r.rhs_variant.map(format_real).unwrap_or_default(),
            format_real(r.slack),
            r.holds.to_string(),
            r.equality.to_string(),
            r.equality_case.clone(),
            r.seed.to_string(),
        ])
        .map_err(enc)?;
    }
    w.flush().map_err(|e| CliError::Encode(e.to_string()))
}

/// Pretty-printed array of row objects. Reals use the shortest
/// representation that parses back to the same `f64`.
pub fn write_json<W: Write>(rows: &[Row], mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, rows).map_err(|e| CliError::Encode(e.to_string()))?;
    out.write_all(b"\n").map_err(|e| CliError::Encode(e.to_string()))
}

pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<Row>> {
    let mut r = csv::Reader::from_reader(input);
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| CliError::Encode(e.to_string()))?;
        let get = |i: usize| rec.get(i).unwrap_or_default().to_owned();
        let real = |i: usize| -> Result<f64> {
            get(i).parse().map_err(|_| CliError::Encode(format!("bad real in column {}", COLUMNS[i])))
        };
        let flag = |i: usize| -> Result<bool> {
            get(i).parse().map_err(|_| CliError::Encode(format!("bad flag in column {}", COLUMNS[i])))
        };
        rows.push(Row {
            scenario_id: get(0),
            check: get(1),
            subcase: get(2),
            lhs: real(3)?,
            rhs_canonical: real(4)?,
            rhs_variant: if get(5).is_empty() { None } else { Some(real(5)?) },
            slack: real(6)?,
            holds: flag(7)?,
            equality: flag(8)?,
            equality_case: get(9),
            seed: get(10).parse().map_err(|_| CliError::Encode("bad seed".into()))?,
        });
    }
    Ok(rows)
}

pub fn read_json(text: &str) -> Result<Vec<Row>> {
    serde_json::from_str(text).map_err(|e| CliError::Encode(e.to_string()))
}

pub fn encode(rows: &[Row], format: Format) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    match format {
        Format::Csv => write_csv(rows, &mut buf)?,
        Format::Json => write_json(rows, &mut buf)?,
    }
    Ok(buf)
}

pub fn emit_report(rows: &[Row], format: Format, path: &Path) -> Result<()> {
    let bytes = encode(rows, format)?;
    std::fs::write(path, bytes).map_err(|source| CliError::Write { path: path.to_path_buf(), source })
}
