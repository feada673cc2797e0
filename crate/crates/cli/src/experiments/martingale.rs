use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use serde_json::json;
use walsh_tf::dyadic::StepFunction;
use walsh_tf::rng::stream_rng;
use walsh_tf::variation::{
    jump_count_greedy, jump_count_max, jump_count_max_with, martingale_jump_field,
    martingale_variation_field, product_variation_sides, ChainStart, KSequence, MartingaleTable,
};

use super::{grid_tag, measure_max, scalar_kind, trials};
use crate::config::ExperimentConfig;
use crate::inputs::{gaussian_function, generate_inputs};
use crate::report::{fmt_f64, Report};
use crate::HarnessError;

const JUMP_OCTAVES: i32 = 8;

/// Scalar inputs of every kind, then H-valued Gaussian inputs with `d ≤ 4`.
fn trial_input(cfg: &ExperimentConfig, trial: usize, seed: u64) -> (String, StepFunction) {
    let grid = cfg.grid();
    let dim = 1 + trial % 4;
    if dim == 1 {
        let kind = scalar_kind(trial / 4);
        (kind.name().to_string(), generate_inputs(kind, &grid, seed))
    } else {
        (format!("gaussian-d{dim}"), gaussian_function(&grid, dim, seed))
    }
}

fn thresholds(f: &StepFunction) -> Vec<f64> {
    let top = f.sup_norm();
    if top == 0.0 {
        return Vec::new();
    }
    (0..JUMP_OCTAVES).map(|u| top * 2f64.powi(-u)).collect()
}

/// Cells and thresholds where the exact jump count exceeds the greedy one.
fn greedy_violations(f: &StepFunction, lambdas: &[f64]) -> usize {
    let table = MartingaleTable::new(f);
    (0..f.grid().cells())
        .map(|c| {
            let s = table.sequence(c);
            lambdas
                .iter()
                .filter(|&&l| {
                    let g = jump_count_greedy(&s, l);
                    jump_count_max(&s, l) > g || jump_count_max_with(&s, l, ChainStart::Infinity) > g
                })
                .count()
        })
        .sum()
}

fn greedy_check(report: &mut Report, violations: usize) {
    report.check(
        "jump_count_max <= jump_count_greedy",
        violations == 0,
        format!("{violations} violations"),
    );
}

pub(super) fn jump(cfg: &ExperimentConfig) -> Result<Report, HarnessError> {
    let q = cfg.p.unwrap_or(2.0);
    let rows = trials(cfg, cfg.trials, |t, s| {
        let (label, f) = trial_input(cfg, t, s);
        let norm = f.lp_norm(q);
        let lambdas = thresholds(&f);
        let (mut ratio, mut at) = (0.0, 0.0);
        for &l in &lambdas {
            let n = martingale_jump_field(&f, l);
            let g: Vec<f64> = n.values().iter().map(|&c| l * c.sqrt()).collect();
            let v = StepFunction::scalar(f.grid(), g)?.lp_norm(q) / norm;
            if v > ratio {
                (ratio, at) = (v, l);
            }
        }
        Ok((t, s, label, f.dim(), ratio, at, greedy_violations(&f, &lambdas)))
    })?;
    let mut report = Report::new("jump", &["trial", "seed", "input", "dim", "q", "ratio", "lambda", "violations"]);
    for (t, s, label, dim, ratio, at, viol) in &rows {
        report.push_row(
            vec![t.to_string(), s.to_string(), label.clone(), dim.to_string(), fmt_f64(q), fmt_f64(*ratio), fmt_f64(*at), viol.to_string()],
            json!({"trial": t, "seed": s, "input": label, "dim": dim, "ratio": ratio, "lambda": at}),
        );
    }
    greedy_check(&mut report, rows.iter().map(|r| r.6).sum());
    measure_max(&mut report, format!("jump/q{q}/{}", grid_tag(cfg)), rows.iter().map(|r| r.4));
    Ok(report)
}

pub(super) fn variation(cfg: &ExperimentConfig) -> Result<Report, HarnessError> {
    let q = cfg.p.unwrap_or(2.0);
    let r = cfg.r;
    let rows = trials(cfg, cfg.trials, |t, s| {
        let (label, f) = trial_input(cfg, t, s);
        let norm = f.lp_norm(q);
        let ratio = if norm == 0.0 {
            0.0
        } else {
            martingale_variation_field(&f, r).lp_norm(q) / norm
        };
        Ok((t, s, label, f.dim(), ratio, greedy_violations(&f, &thresholds(&f))))
    })?;
    let mut report = Report::new("variation", &["trial", "seed", "input", "dim", "r", "q", "ratio", "violations"]);
    for (t, s, label, dim, ratio, viol) in &rows {
        report.push_row(
            vec![t.to_string(), s.to_string(), label.clone(), dim.to_string(), fmt_f64(r), fmt_f64(q), fmt_f64(*ratio), viol.to_string()],
            json!({"trial": t, "seed": s, "input": label, "dim": dim, "ratio": ratio}),
        );
    }
    greedy_check(&mut report, rows.iter().map(|r| r.5).sum());
    measure_max(&mut report, format!("variation/r{r}/q{q}/{}", grid_tag(cfg)), rows.iter().map(|r| r.4));
    Ok(report)
}

/// Random `H`-valued sequences `a, b` and their coordinatewise product.
pub(super) fn minkowski(cfg: &ExperimentConfig) -> Result<Report, HarnessError> {
    let r = cfg.r;
    let rows = trials(cfg, cfg.trials, |t, s| {
        let mut rng = stream_rng(s, 0);
        let dim = 1 + t % 4;
        let len = rng.random_range(2..=12usize);
        let keys: Vec<i32> = (0..len as i32).rev().collect();
        let draw = |rng: &mut walsh_tf::rng::Rng| {
            let v = (0..len * dim).map(|_| StandardNormal.sample(rng)).collect();
            KSequence::new(keys.clone(), dim, v)
        };
        let (mut a, mut b) = (draw(&mut rng)?, draw(&mut rng)?);
        if rng.random_bool(0.5) {
            a = a.with_infinity();
            b = b.with_infinity();
        }
        let (lhs, rhs) = product_variation_sides(&a, &b, r)?;
        let ratio = if lhs == 0.0 { 0.0 } else { lhs / rhs };
        Ok((t, s, dim, len, lhs, rhs, ratio))
    })?;
    let mut report = Report::new("minkowski", &["trial", "seed", "dim", "len", "r", "lhs", "rhs", "ratio"]);
    for &(t, s, dim, len, lhs, rhs, ratio) in &rows {
        report.push_row(
            vec![t.to_string(), s.to_string(), dim.to_string(), len.to_string(), fmt_f64(r), fmt_f64(lhs), fmt_f64(rhs), fmt_f64(ratio)],
            json!({"trial": t, "seed": s, "lhs": lhs, "rhs": rhs}),
        );
    }
    let bad = rows
        .iter()
        .filter(|row| row.4 > std::f64::consts::SQRT_2 * row.5 * (1.0 + 1e-12))
        .count();
    report.check("lhs <= sqrt(2) * rhs", bad == 0, format!("{bad} violations"));
    measure_max(&mut report, format!("minkowski/r{r}"), rows.iter().map(|r| r.6));
    Ok(report)
}
