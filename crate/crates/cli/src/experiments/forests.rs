use std::collections::BTreeSet;

use serde_json::json;
use walsh_tf::rng::derive_seed;
use walsh_tf::size::{
    collection_size, maximal_inf, select_forest, split_forest, tree_partial_sums, tree_size,
    Truncation,
};
use walsh_tf::tiles::{Bitile, TileCoefficients};
use walsh_tf::variation::variation_norm;

use super::{grid_tag, measure_max, scalar_kind, trials};
use crate::config::ExperimentConfig;
use crate::inputs::{generate_inputs, random_bitiles, random_two_tree};
use crate::report::{fmt_f64, Report};
use crate::HarnessError;

/// `tree_size(T, f) ≤ inf_{I_T} M₂ f` on random 2-trees, with no constant.
pub(super) fn size_bound(cfg: &ExperimentConfig) -> Result<Report, HarnessError> {
    let grid = cfg.grid();
    let rows = trials(cfg, cfg.trials, |t, s| {
        let tree = random_two_tree(&grid, s);
        let kind = scalar_kind(t);
        let f = generate_inputs(kind, &grid, derive_seed(s, 1));
        let size = tree_size(&tree, &f)?;
        let inf = maximal_inf(&f, 2.0, &tree.top_time())?;
        Ok((t, s, kind.name(), tree.len(), size, inf))
    })?;
    let mut report = Report::new("size-bound", &["trial", "seed", "input", "bitiles", "size", "inf_m2", "slack"]);
    for &(t, s, kind, len, size, inf) in &rows {
        report.push_row(
            vec![t.to_string(), s.to_string(), kind.into(), len.to_string(), fmt_f64(size), fmt_f64(inf), fmt_f64(inf - size)],
            json!({"trial": t, "seed": s, "size": size, "inf_m2": inf}),
        );
    }
    let bad = rows.iter().filter(|r| r.4 > r.5 + 1e-12).count();
    report.check("tree_size <= inf M2 f + 1e-12", bad == 0, format!("{bad} violations"));
    Ok(report)
}

/// Checks partition, level bounds and split structure of one selection.
fn selection_faults(
    s: &[Bitile],
    levels: &[walsh_tf::size::SizedForestLevel],
    f: &walsh_tf::dyadic::StepFunction,
) -> Result<(bool, bool), HarnessError> {
    let mut seen: Vec<Bitile> = levels.iter().flat_map(|l| l.bitiles.iter().copied()).collect();
    seen.sort();
    let mut want = s.to_vec();
    want.sort();
    let partition = seen == want
        && levels.iter().all(|l| {
            let in_trees: BTreeSet<Bitile> = l.forest.bitiles().copied().collect();
            let own: BTreeSet<Bitile> = l.bitiles.iter().copied().collect();
            in_trees == own && l.forest.bitiles().count() == l.bitiles.len()
        });
    let mut bounds = levels.windows(2).all(|w| w[0].n < w[1].n);
    for (i, level) in levels.iter().enumerate() {
        let rest: Vec<Bitile> = levels[i..].iter().flat_map(|l| l.bitiles.iter().copied()).collect();
        let size = collection_size(&rest, f)?;
        bounds &= if level.zero_size {
            size == 0.0
        } else {
            size <= 2f64.powi(-level.n) * (1.0 + 1e-12)
        };
        let split = split_forest(&level.bitiles, &level.forest)?;
        bounds &= split.two_tree_forest.iter().all(|t| t.is_two_tree())
            && split.one_tree_forest.iter().all(|t| t.is_one_tree());
    }
    Ok((partition, bounds))
}

pub(super) fn bessel(cfg: &ExperimentConfig) -> Result<Report, HarnessError> {
    let grid = cfg.grid();
    let rows = trials(cfg, cfg.trials, |t, s| {
        let bitiles = random_bitiles(&grid, 0.5, s);
        let kind = scalar_kind(t);
        let f = generate_inputs(kind, &grid, derive_seed(s, 1));
        let levels = select_forest(&bitiles, &f)?;
        let (partition, bounds) = selection_faults(&bitiles, &levels, &f)?;
        let norm = f.l2_norm();
        let ratios: Vec<f64> = levels.iter().map(|l| l.bessel_ratio(norm)).collect();
        let ns: Vec<i32> = levels.iter().map(|l| l.n).collect();
        let ratio = ratios.iter().copied().fold(0.0, f64::max);
        Ok((t, s, kind.name(), bitiles.len(), ns, ratios, ratio, partition, bounds))
    })?;
    let mut report = Report::new(
        "bessel",
        &["trial", "seed", "input", "bitiles", "levels", "ratio", "partition", "level_bounds"],
    );
    for (t, s, kind, len, ns, ratios, ratio, partition, bounds) in &rows {
        report.push_row(
            vec![t.to_string(), s.to_string(), kind.to_string(), len.to_string(), ns.len().to_string(), fmt_f64(*ratio), partition.to_string(), bounds.to_string()],
            json!({"trial": t, "seed": s, "levels": ns, "bessel_ratios": ratios}),
        );
    }
    let bad_p = rows.iter().filter(|r| !r.7).count();
    let bad_b = rows.iter().filter(|r| !r.8).count();
    report.check("levels partition S", bad_p == 0, format!("{bad_p} failures"));
    report.check("level size bounds", bad_b == 0, format!("{bad_b} failures"));
    measure_max(&mut report, format!("bessel/{}", grid_tag(cfg)), rows.iter().map(|r| r.6));
    Ok(report)
}

/// `‖ ‖Σ_{|I_P| < 2^k} a_P w_{P₁}‖_{V^r(k)} ‖_{L²} / (size · |I_T|^{1/2})`.
pub(super) fn tree_variation(cfg: &ExperimentConfig) -> Result<Report, HarnessError> {
    let grid = cfg.grid();
    let r = cfg.r;
    let rows = trials(cfg, cfg.trials, |t, s| {
        let tree = random_two_tree(&grid, s);
        let kind = scalar_kind(t);
        let f = generate_inputs(kind, &grid, derive_seed(s, 1));
        let coeffs = TileCoefficients::new(&f)?;
        let a = |p: &Bitile| coeffs.lower(p).unwrap_or(0.0);
        let size = tree_size(&tree, &f)?;
        let sum: f64 = (0..grid.cells())
            .map(|c| variation_norm(&tree_partial_sums(&tree, &a, &grid, c, Truncation::Strict), r).powi(2))
            .sum();
        let lhs = (sum * grid.cell_width()).sqrt();
        let rhs = size * tree.top_time().length().sqrt();
        let ratio = if lhs == 0.0 { 0.0 } else { lhs / rhs };
        Ok((t, s, kind.name(), tree.len(), lhs, rhs, ratio))
    })?;
    let mut report = Report::new("tree-variation", &["trial", "seed", "input", "bitiles", "r", "lhs", "rhs", "ratio"]);
    for &(t, s, kind, len, lhs, rhs, ratio) in &rows {
        report.push_row(
            vec![t.to_string(), s.to_string(), kind.into(), len.to_string(), fmt_f64(r), fmt_f64(lhs), fmt_f64(rhs), fmt_f64(ratio)],
            json!({"trial": t, "seed": s, "lhs": lhs, "rhs": rhs}),
        );
    }
    measure_max(&mut report, format!("tree-variation/r{r}/{}", grid_tag(cfg)), rows.iter().map(|r| r.6));
    Ok(report)
}
