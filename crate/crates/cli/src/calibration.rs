//! Recorded constants for the calibrated ratios.
//!
//! A calibration run stores `HEADROOM` times the largest measured value under
//! the measurement id. Verify runs only read the store.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::HarnessError;

/// Factor between the measured maximum and the stored constant.
pub const HEADROOM: f64 = 1.25;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationEntry {
    pub constant: f64,
    pub measured: f64,
    pub grid_j: u32,
    pub grid_k: u32,
    pub seed: u64,
    pub trials: usize,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CalibrationStore {
    pub entries: BTreeMap<String, CalibrationEntry>,
}

impl CalibrationStore {
    /// A missing file is an empty store.
    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        match std::fs::read_to_string(path) {
            Ok(text) => serde_json::from_str(&text).map_err(|e| {
                HarnessError::Config(format!("bad calibration file {}: {e}", path.display()))
            }),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Self::default()),
            Err(e) => Err(HarnessError::Io(path.display().to_string(), e.to_string())),
        }
    }

    pub fn save(&self, path: &Path) -> Result<(), HarnessError> {
        let mut text = serde_json::to_string_pretty(self).expect("store serializes");
        text.push('\n');
        std::fs::write(path, text).map_err(|e| HarnessError::Io(path.display().to_string(), e.to_string()))
    }

    pub fn get(&self, id: &str) -> Option<&CalibrationEntry> {
        self.entries.get(id)
    }

    pub fn record(&mut self, id: &str, measured: f64, cfg: &ExperimentConfig) {
        let timestamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        self.entries.insert(
            id.to_string(),
            CalibrationEntry {
                constant: measured * HEADROOM,
                measured,
                grid_j: cfg.grid_j,
                grid_k: cfg.grid_k,
                seed: cfg.seed,
                trials: cfg.trials,
                timestamp,
            },
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ExperimentKind;

    #[test]
    fn round_trip_and_missing_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("calib.json");
        assert!(CalibrationStore::load(&path).unwrap().entries.is_empty());
        let mut store = CalibrationStore::default();
        store.record("jump/q2/g3x3", 0.8, &ExperimentConfig::new(ExperimentKind::Jump));
        store.save(&path).unwrap();
        let back = CalibrationStore::load(&path).unwrap();
        assert_eq!(back, store);
        assert_eq!(back.get("jump/q2/g3x3").unwrap().constant, 1.0);
    }
}
