//! The experiment drivers. Each returns a [`Report`]; [`crate::run_experiment`]
//! handles files and calibration.

mod forests;
mod martingale;
mod multipliers;
mod operator;

use rayon::prelude::*;
use walsh_tf::rng::derive_seed;

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::inputs::InputKind;
use crate::report::Report;
use crate::HarnessError;

pub fn run(cfg: &ExperimentConfig) -> Result<Report, HarnessError> {
    match cfg.experiment {
        ExperimentKind::Jump => martingale::jump(cfg),
        ExperimentKind::Variation => martingale::variation(cfg),
        ExperimentKind::Minkowski => martingale::minkowski(cfg),
        ExperimentKind::SizeBound => forests::size_bound(cfg),
        ExperimentKind::Bessel => forests::bessel(cfg),
        ExperimentKind::TreeVariation => forests::tree_variation(cfg),
        ExperimentKind::Bourgain => multipliers::bourgain(cfg),
        ExperimentKind::DisjointBands => multipliers::disjoint_bands(cfg),
        ExperimentKind::OracleCrosscheck => multipliers::oracle_crosscheck(cfg),
        ExperimentKind::TreePointwise => operator::tree_pointwise(cfg),
        ExperimentKind::WeakType => operator::weak_type(cfg),
    }
}

/// Runs `f(trial, seed)` for every trial in parallel; results in trial order.
fn trials<T, F>(cfg: &ExperimentConfig, count: usize, f: F) -> Result<Vec<T>, HarnessError>
where
    T: Send,
    F: Fn(usize, u64) -> Result<T, HarnessError> + Sync,
{
    (0..count)
        .into_par_iter()
        .map(|t| f(t, derive_seed(cfg.seed, t as u64)))
        .collect()
}

fn grid_tag(cfg: &ExperimentConfig) -> String {
    format!("g{}x{}", cfg.grid_j, cfg.grid_k)
}

/// Scalar input kinds in rotation.
fn scalar_kind(trial: usize) -> InputKind {
    InputKind::ALL[trial % InputKind::ALL.len()]
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

/// Adds the measurement when there is at least one trial.
fn measure_max(report: &mut Report, id: String, values: impl IntoIterator<Item = f64>) {
    let mut it = values.into_iter().peekable();
    if it.peek().is_some() {
        report.measure(id, max_of(it));
    }
}
