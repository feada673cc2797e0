//! Experiment configuration: defaults, `key = value` files and flag overrides.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use serde::Serialize;
use walsh_tf::dyadic::Grid;

use crate::HarnessError;

/// Environment variable naming the calibration store.
pub const CALIB_ENV: &str = "WALSH_TF_CALIB";

/// Largest `gridJ + gridK` accepted.
pub const MAX_GRID_BITS: u32 = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    /// Jump counts of the dyadic martingale.
    Jump,
    /// `V^r` norms of the dyadic martingale.
    Variation,
    /// Size of a 2-tree against the maximal function on its top.
    SizeBound,
    /// Forest selection: partition, level bounds, Bessel ratio.
    Bessel,
    /// Maximal band multipliers with weights of bounded variation.
    Bourgain,
    /// `W^max` over a forest of 2-trees outside the exceptional sets.
    TreePointwise,
    /// Level sets of `W^max 1_F`.
    WeakType,
    /// Ascent, oracle and upper bound for `M₂*` on tiny families.
    OracleCrosscheck,
    /// `V^r` of tree partial sums against size.
    TreeVariation,
    /// Coordinatewise product bound for `V^r`.
    Minkowski,
    /// Pairwise disjoint bands with `k`-dependent weights.
    DisjointBands,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Jump => "jump",
            Self::Variation => "variation",
            Self::SizeBound => "size-bound",
            Self::Bessel => "bessel",
            Self::Bourgain => "bourgain",
            Self::TreePointwise => "tree-pointwise",
            Self::WeakType => "weak-type",
            Self::OracleCrosscheck => "oracle-crosscheck",
            Self::TreeVariation => "tree-variation",
            Self::Minkowski => "minkowski",
            Self::DisjointBands => "disjoint-bands",
        }
    }
}

impl FromStr for ExperimentKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        <Self as ValueEnum>::from_str(s.trim(), true)
            .map_err(|_| HarnessError::Config(format!("unknown experiment `{s}`")))
    }
}

/// Weights used by the bourgain experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightKind {
    /// `ε ≡ 1`.
    #[default]
    Ones,
    /// Independent standard normal weights.
    Gaussian,
}

impl FromStr for WeightKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        <Self as ValueEnum>::from_str(s.trim(), true)
            .map_err(|_| HarnessError::Config(format!("unknown weight kind `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub grid_j: u32,
    pub grid_k: u32,
    pub seed: u64,
    pub trials: usize,
    pub r: f64,
    /// Integrability exponent; each experiment has its own default.
    pub p: Option<f64>,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    pub calibrate: bool,
    #[serde(skip)]
    pub calib: Option<PathBuf>,
    /// Ascent restarts for `M₂*` lower bounds.
    pub restarts: Option<usize>,
    pub weights: WeightKind,
    /// Exponents of the weak-type experiment.
    pub ps: Vec<f64>,
    /// Thresholds of the weak-type experiment.
    pub lambdas: Vec<f64>,
    /// Bitile file for the weak-type experiment; all grid bitiles if unset.
    #[serde(skip)]
    pub bitiles: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentKind) -> Self {
        Self {
            experiment,
            grid_j: 3,
            grid_k: 3,
            seed: 0,
            trials: 100,
            r: 2.5,
            p: None,
            out: None,
            calibrate: false,
            calib: None,
            restarts: None,
            weights: WeightKind::Ones,
            ps: vec![1.5, 2.0, 3.0],
            lambdas: vec![0.25, 0.5, 1.0, 2.0, 4.0],
            bitiles: None,
        }
    }

    pub fn grid(&self) -> Grid {
        Grid::new(self.grid_j, self.grid_k)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if self.grid_j + self.grid_k > MAX_GRID_BITS {
            return bad(format!(
                "gridJ + gridK = {} exceeds {MAX_GRID_BITS}",
                self.grid_j + self.grid_k
            ));
        }
        if !(self.r > 2.0) || !self.r.is_finite() {
            return bad(format!("r = {} must exceed 2", self.r));
        }
        if let Some(p) = self.p {
            if !(p > 1.0) {
                return bad(format!("p = {p} must exceed 1"));
            }
        }
        if let Some(&p) = self.ps.iter().find(|&&p| !(p > 1.0)) {
            return bad(format!("p = {p} in ps must exceed 1"));
        }
        if let Some(&l) = self.lambdas.iter().find(|&&l| !(l > 0.0)) {
            return bad(format!("lambda = {l} must be positive"));
        }
        if self.restarts == Some(0) {
            return bad("restarts must be positive".into());
        }
        Ok(())
    }

    /// Sets one field from its text form. Keys accept `-` or `_` and the
    /// `gridJ` spelling.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), HarnessError> {
        let v = value.trim();
        let err = |what: &str| HarnessError::Config(format!("bad value `{v}` for {what}"));
        match normalize_key(key).as_str() {
            "experiment" => self.experiment = v.parse()?,
            "grid_j" => self.grid_j = v.parse().map_err(|_| err(key))?,
            "grid_k" => self.grid_k = v.parse().map_err(|_| err(key))?,
            "seed" => self.seed = v.parse().map_err(|_| err(key))?,
            "trials" => self.trials = v.parse().map_err(|_| err(key))?,
            "r" => self.r = v.parse().map_err(|_| err(key))?,
            "p" => self.p = Some(v.parse().map_err(|_| err(key))?),
            "out" | "out_path" => self.out = Some(PathBuf::from(v)),
            "calibrate" => self.calibrate = v.parse().map_err(|_| err(key))?,
            "calib" => self.calib = Some(PathBuf::from(v)),
            "restarts" => self.restarts = Some(v.parse().map_err(|_| err(key))?),
            "weights" => self.weights = v.parse()?,
            "ps" => self.ps = parse_list(v).ok_or_else(|| err(key))?,
            "lambdas" => self.lambdas = parse_list(v).ok_or_else(|| err(key))?,
            "bitiles" => self.bitiles = Some(PathBuf::from(v)),
            _ => return Err(HarnessError::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }
}

fn normalize_key(key: &str) -> String {
    let k = key.trim();
    match k {
        "gridJ" => "grid_j".into(),
        "gridK" => "grid_k".into(),
        "outPath" => "out_path".into(),
        _ => k.replace('-', "_").to_ascii_lowercase(),
    }
}

fn parse_list(v: &str) -> Option<Vec<f64>> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().ok())
        .collect()
}

/// Parses `key = value` lines. Blank lines and `#` comments are skipped;
/// later keys win.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, HarnessError> {
    let mut map = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(HarnessError::Config(format!(
                "line {}: expected `key = value`",
                n + 1
            )));
        };
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, HarnessError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config_text(&text)
}

/// `walsh-tf <experiment> [flags]`. Flags override values from `--config`.
#[derive(Debug, Parser)]
#[command(name = "walsh-tf", version, about = "Seeded verification experiments on dyadic grids")]
pub struct Cli {
    /// Experiment to run; may also come from the config file.
    #[arg(value_enum)]
    pub experiment: Option<ExperimentKind>,
    /// File of `key = value` lines.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub grid_j: Option<u32>,
    #[arg(long)]
    pub grid_k: Option<u32>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    /// CSV report path; the JSON report goes next to it with a `.json` extension.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Record constants instead of checking against them.
    #[arg(long)]
    pub calibrate: bool,
    /// Calibration store; defaults to `$WALSH_TF_CALIB`.
    #[arg(long)]
    pub calib: Option<PathBuf>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long, value_enum)]
    pub weights: Option<WeightKind>,
    /// Comma-separated exponents for weak-type.
    #[arg(long)]
    pub ps: Option<String>,
    /// Comma-separated thresholds for weak-type.
    #[arg(long)]
    pub lambdas: Option<String>,
    /// Bitile file for weak-type.
    #[arg(long)]
    pub bitiles: Option<PathBuf>,
}

impl Cli {
    /// Defaults, then the config file, then flags, then the environment for
    /// the calibration path.
    pub fn resolve(&self) -> Result<ExperimentConfig, HarnessError> {
        let file = match &self.config {
            Some(path) => read_config_file(path)?,
            None => BTreeMap::new(),
        };
        let experiment = match (self.experiment, file.get("experiment")) {
            (Some(e), _) => e,
            (None, Some(v)) => v.parse()?,
            (None, None) => return Err(HarnessError::Config("no experiment given".into())),
        };
        let mut cfg = ExperimentConfig::new(experiment);
        for (k, v) in &file {
            cfg.set(k, v)?;
        }
        cfg.experiment = experiment;
        macro_rules! over {
            ($($field:ident),*) => {$(
                if let Some(v) = self.$field.clone() {
                    cfg.$field = v;
                }
            )*};
        }
        over!(grid_j, grid_k, seed, trials, r, weights);
        if let Some(p) = self.p {
            cfg.p = Some(p);
        }
        if let Some(r) = self.restarts {
            cfg.restarts = Some(r);
        }
        for (flag, value) in [("out", &self.out), ("calib", &self.calib), ("bitiles", &self.bitiles)] {
            if let Some(path) = value {
                cfg.set(flag, &path.to_string_lossy())?;
            }
        }
        if let Some(v) = &self.ps {
            cfg.set("ps", v)?;
        }
        if let Some(v) = &self.lambdas {
            cfg.set("lambdas", v)?;
        }
        cfg.calibrate |= self.calibrate;
        if cfg.calib.is_none() {
            cfg.calib = std::env::var_os(CALIB_ENV).map(PathBuf::from);
        }
        cfg.validate()?;
        Ok(cfg)
    }
}
