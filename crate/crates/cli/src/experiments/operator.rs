use serde_json::json;
use walsh_tf::carleson::{
    coefficient_sup, pointwise_tree_bound_check, tree_bound_ratios, weak_type_experiment,
    EstimatorMode, EstimatorOptions, TreeBoundParams,
};
use walsh_tf::rng::derive_seed;
use walsh_tf::size::{exceptional_counting, select_forest, tree_variation_maxima, Truncation};
use walsh_tf::tiles::{grid_bitiles, parse_bitiles, Bitile, TileCoefficients};

use super::{grid_tag, measure_max, scalar_kind, trials};
use crate::config::ExperimentConfig;
use crate::inputs::{generate_inputs, random_bitiles, random_dyadic_set};
use crate::report::{fmt_f64, Report};
use crate::HarnessError;

/// Counting thresholds `β` tried on every forest.
pub const BETAS: [f64; 3] = [1.0, 2.0, 4.0];

fn options(cfg: &ExperimentConfig, seed: u64) -> EstimatorOptions {
    EstimatorOptions {
        mode: EstimatorMode::Auto,
        restarts: cfg.restarts.unwrap_or(16),
        seed,
    }
}

fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    Some(v[v.len() / 2])
}

struct PointwiseRow {
    trial: usize,
    seed: u64,
    level: i32,
    trees: usize,
    beta: f64,
    gamma: f64,
    sigma: f64,
    excluded: usize,
    exact: usize,
    ratio: f64,
}

/// The 2-tree forest of every selection level. `γ` is the median of the
/// positive tree `V^r` maxima and `σ` the coefficient sup, so both
/// preconditions hold.
pub(super) fn tree_pointwise(cfg: &ExperimentConfig) -> Result<Report, HarnessError> {
    let grid = cfg.grid();
    let r = cfg.r;
    let per_trial = trials(cfg, cfg.trials, |t, s| {
        let bitiles = random_bitiles(&grid, 0.5, s);
        let f = generate_inputs(scalar_kind(t), &grid, derive_seed(s, 1));
        let coeffs = TileCoefficients::new(&f)?;
        let a = |p: &Bitile| coeffs.lower(p).unwrap_or(0.0);
        let mut out = Vec::new();
        let mut spot_ok = true;
        for level in select_forest(&bitiles, &f)? {
            let forest = &level.two_tree_forest;
            let members: Vec<Bitile> = forest.bitiles().copied().collect();
            let sigma = coefficient_sup(&members, &coeffs)?;
            let maxima = tree_variation_maxima(forest, &a, r, &grid, Truncation::Strict);
            let Some(gamma) = median(maxima.into_iter().filter(|&v| v > 0.0).collect()) else {
                continue;
            };
            let opts = options(cfg, derive_seed(s, 2));
            let mut params = TreeBoundParams { r, beta: 1.0, gamma, sigma };
            let base = tree_bound_ratios(&members, forest, &f, &params, &opts)?;
            let exact = base.wmax.exact.iter().filter(|&&e| e).count();
            if let Some(x) = base.ratios.iter().position(Option::is_some) {
                let single = pointwise_tree_bound_check(&members, forest, &f, &params, x, &opts)?;
                spot_ok &= single == base.ratios[x].unwrap();
            }
            for beta in BETAS {
                params.beta = beta;
                let counting = exceptional_counting(forest, beta, &grid);
                let denom = params.denominator();
                let kept: Vec<usize> = (0..grid.cells())
                    .filter(|&c| !counting.contains(c) && !base.variation_set.contains(c))
                    .collect();
                let ratio = kept.iter().map(|&c| base.wmax.lower[c] / denom).fold(0.0, f64::max);
                out.push(PointwiseRow {
                    trial: t,
                    seed: s,
                    level: level.n,
                    trees: forest.len(),
                    beta,
                    gamma,
                    sigma,
                    excluded: grid.cells() - kept.len(),
                    exact,
                    ratio,
                });
            }
        }
        Ok((out, spot_ok))
    })?;
    let mut report = Report::new(
        "tree-pointwise",
        &["trial", "seed", "level", "trees", "beta", "gamma", "sigma", "excluded", "exact_cells", "ratio"],
    );
    let spot_bad = per_trial.iter().filter(|p| !p.1).count();
    for row in per_trial.iter().flat_map(|p| &p.0) {
        report.push_row(
            vec![
                row.trial.to_string(),
                row.seed.to_string(),
                row.level.to_string(),
                row.trees.to_string(),
                fmt_f64(row.beta),
                fmt_f64(row.gamma),
                fmt_f64(row.sigma),
                row.excluded.to_string(),
                row.exact.to_string(),
                fmt_f64(row.ratio),
            ],
            json!({
                "trial": row.trial, "seed": row.seed, "level": row.level, "beta": row.beta,
                "gamma": row.gamma, "sigma": row.sigma, "excluded": row.excluded,
                "exact_cells": row.exact, "ratio": row.ratio,
            }),
        );
    }
    report.check(
        "single-cell check agrees with the field",
        spot_bad == 0,
        format!("{spot_bad} trials disagree"),
    );
    if cfg.trials > 0 {
        let ratios: Vec<f64> = per_trial.iter().flat_map(|p| p.0.iter().map(|r| r.ratio)).collect();
        report.measure(
            format!("tree-pointwise/r{r}/{}", grid_tag(cfg)),
            ratios.into_iter().fold(0.0, f64::max),
        );
    }
    Ok(report)
}

fn weak_type_bitiles(cfg: &ExperimentConfig) -> Result<Vec<Bitile>, HarnessError> {
    match &cfg.bitiles {
        None => Ok(grid_bitiles(&cfg.grid())),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| HarnessError::Io(path.display().to_string(), e.to_string()))?;
            let set = parse_bitiles(&text)?;
            let grid = cfg.grid();
            if let Some(p) = set.iter().find(|p| !p.fits(&grid)) {
                return Err(HarnessError::Config(format!("bitile {p} does not fit the grid")));
            }
            Ok(set)
        }
    }
}

/// One random dyadic `F` per trial; every `(p, λ)` on each.
pub(super) fn weak_type(cfg: &ExperimentConfig) -> Result<Report, HarnessError> {
    let grid = cfg.grid();
    let bitiles = weak_type_bitiles(cfg)?;
    let rows = trials(cfg, cfg.trials, |_, s| {
        let set = random_dyadic_set(&grid, s);
        Ok(weak_type_experiment(&bitiles, &set, &cfg.ps, &cfg.lambdas, &options(cfg, s))?)
    })?;
    let mut report = Report::new(
        "weak-type",
        &["gridJ", "gridK", "p", "lambda", "measF", "measLevelSet", "ratio", "seed"],
    );
    for (t, w) in rows.iter().enumerate().flat_map(|(t, v)| v.iter().map(move |w| (t, w))) {
        report.push_row(
            vec![
                w.grid_j.to_string(),
                w.grid_k.to_string(),
                fmt_f64(w.p),
                fmt_f64(w.lambda),
                fmt_f64(w.meas_f),
                fmt_f64(w.meas_level_set),
                fmt_f64(w.ratio),
                w.seed.to_string(),
            ],
            json!({
                "trial": t, "p": w.p, "lambda": w.lambda, "measF": w.meas_f,
                "measLevelSet": w.meas_level_set, "ratio": w.ratio, "seed": w.seed,
                "measLevelSetUpper": w.detail.meas_level_set_upper,
                "measExcluded": w.detail.meas_excluded,
                "measLevelSetOutside": w.detail.meas_level_set_outside,
                "sizeScaled": w.detail.size_scaled,
            }),
        );
    }
    for &p in &cfg.ps {
        measure_max(
            &mut report,
            format!("weak-type/p{p}/{}", grid_tag(cfg)),
            rows.iter().flatten().filter(|w| w.p == p).map(|w| w.ratio),
        );
    }
    Ok(report)
}
