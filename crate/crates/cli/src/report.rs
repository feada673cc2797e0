//! Report tables and their CSV and JSON forms.

use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::HarnessError;

/// A calibrated quantity: the largest value of a ratio over the run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Measurement {
    pub id: String,
    pub value: f64,
}

/// An exact property; never calibrated.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub experiment: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub measurements: Vec<Measurement>,
    pub checks: Vec<Check>,
    /// Per-row detail, in row order.
    pub detail: Vec<Value>,
}

/// Shortest text that parses back to the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

impl Report {
    pub fn new(experiment: &str, header: &[&str]) -> Self {
        Self {
            experiment: experiment.to_string(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            measurements: Vec::new(),
            checks: Vec::new(),
            detail: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<String>, detail: Value) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
        self.detail.push(detail);
    }

    pub fn measure(&mut self, id: String, value: f64) {
        self.measurements.push(Measurement { id, value });
    }

    pub fn check(&mut self, name: &str, passed: bool, detail: String) {
        self.checks.push(Check {
            name: name.to_string(),
            passed,
            detail,
        });
    }

    pub fn checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Values of one column, parsed as numbers.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.header.iter().position(|h| h == name)?;
        self.rows.iter().map(|r| r[i].parse().ok()).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Writes `out` (CSV) and `out` with a `.json` extension.
    pub fn write(&self, out: &Path) -> Result<PathBuf, HarnessError> {
        let io = |p: &Path, e: std::io::Error| HarnessError::Io(p.display().to_string(), e.to_string());
        std::fs::write(out, self.to_csv()).map_err(|e| io(out, e))?;
        let json = out.with_extension("json");
        std::fs::write(&json, self.to_json()).map_err(|e| io(&json, e))?;
        Ok(json)
    }
}
