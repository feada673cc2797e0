//! Seeded, deterministic experiment harness for the `walsh_tf` library.
//!
//! Each experiment draws its inputs from per-trial seeds
//! `derive_seed(master, trial)`, runs trials in parallel, and merges rows in
//! trial order, so identical configurations give byte-identical reports.
//! Calibrated ratios are compared with a JSON store of recorded constants.

pub mod calibration;
pub mod config;
pub mod experiments;
pub mod inputs;
pub mod report;

use std::path::PathBuf;

use serde::Serialize;

use calibration::CalibrationStore;
use config::ExperimentConfig;
use report::Report;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("missing calibration constant `{0}`")]
    MissingConstant(String),
    #[error("{0}: {1}")]
    Io(String, String),
    #[error(transparent)]
    Compute(#[from] walsh_tf::Error),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::MissingConstant(_) => 2,
            Self::Io(..) | Self::Compute(_) => 3,
        }
    }
}

/// A measurement against its recorded constant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub id: String,
    pub value: f64,
    pub constant: f64,
    pub passed: bool,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Report,
    /// Empty in calibrate mode.
    pub comparisons: Vec<Comparison>,
    pub exit_code: i32,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.exit_code == 0
    }
}

/// Runs one experiment, writes its reports, and compares or records the
/// calibrated measurements.
///
/// Exit codes: 0 when every check passes and no measurement exceeds its
/// constant; 1 otherwise.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Outcome, HarnessError> {
    cfg.validate()?;
    let report = experiments::run(cfg)?;
    if let Some(out) = &cfg.out {
        report.write(out)?;
    }
    let mut comparisons = Vec::new();
    if !report.measurements.is_empty() {
        let path: PathBuf = cfg.calib.clone().ok_or_else(|| {
            HarnessError::Config("no calibration store: pass --calib or set WALSH_TF_CALIB".into())
        })?;
        let mut store = CalibrationStore::load(&path)?;
        if cfg.calibrate {
            for m in &report.measurements {
                store.record(&m.id, m.value, cfg);
            }
            store.save(&path)?;
        } else {
            for m in &report.measurements {
                let entry = store
                    .get(&m.id)
                    .ok_or_else(|| HarnessError::MissingConstant(m.id.clone()))?;
                comparisons.push(Comparison {
                    id: m.id.clone(),
                    value: m.value,
                    constant: entry.constant,
                    passed: m.value <= entry.constant,
                });
            }
        }
    }
    let ok = report.checks_pass() && comparisons.iter().all(|c| c.passed);
    Ok(Outcome {
        report,
        comparisons,
        exit_code: if ok { 0 } else { 1 },
    })
}
