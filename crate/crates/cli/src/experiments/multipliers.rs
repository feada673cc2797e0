use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use serde_json::json;
use walsh_tf::multiplier::{
    band_multiplier, bourgain_experiment, bourgain_factor, m2star_lower, m2star_oracle,
    m2star_upper, BourgainRow, DisjointBands, FrequencySet, MultiplierFamily, WeightFamily,
};
use walsh_tf::rng::stream_rng;
use walsh_tf::Error;

use super::{grid_tag, max_of, measure_max, trials};
use crate::config::{ExperimentConfig, WeightKind};
use crate::inputs::random_interval;
use crate::report::{fmt_f64, Report};
use crate::HarnessError;

/// Frequency counts of the scaling experiments.
pub const SCALING_NS: [usize; 3] = [2, 4, 8];

/// Allowed excess of the fitted exponent over `r/4 - 1/2`.
pub const SLOPE_SLACK: f64 = 0.1;

const BOURGAIN_HEADER: [&str; 7] = ["N", "r", "sigma", "lhs", "rhs", "ratio", "seed"];

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = points.iter().map(|&(x, y)| (x.ln(), y.ln())).unzip();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

fn scaling_ns(cfg: &ExperimentConfig) -> Vec<usize> {
    SCALING_NS.into_iter().filter(|&n| n <= cfg.grid().cells()).collect()
}

fn push_rows(report: &mut Report, rows: &[BourgainRow]) {
    for b in rows {
        report.push_row(
            vec![b.n.to_string(), fmt_f64(b.r), fmt_f64(b.sigma), fmt_f64(b.lhs), fmt_f64(b.rhs), fmt_f64(b.ratio), b.seed.to_string()],
            json!({"N": b.n, "r": b.r, "sigma": b.sigma, "lhs": b.lhs, "rhs": b.rhs, "ratio": b.ratio, "seed": b.seed}),
        );
    }
}

/// `max lhs / (σ ‖f‖₂)` for each `N`, then the fitted exponent.
fn slope_check(report: &mut Report, rows: &[BourgainRow], ns: &[usize], r: f64) {
    let points: Vec<(f64, f64)> = ns
        .iter()
        .map(|&n| {
            let m = max_of(rows.iter().filter(|b| b.n == n).map(|b| b.ratio * bourgain_factor(n, r)));
            (n as f64, m)
        })
        .collect();
    if points.len() < 2 || points.iter().any(|p| !(p.1 > 0.0)) {
        report.check("growth exponent", true, "not enough positive maxima to fit".into());
        return;
    }
    let slope = log_log_slope(&points);
    let limit = r / 4.0 - 0.5 + SLOPE_SLACK;
    report.check(
        "growth exponent",
        slope <= limit,
        format!("fitted {slope} against {limit}, maxima {points:?}"),
    );
}

/// Random `Ξ` with `|Ξ| = N` each trial.
pub(super) fn bourgain(cfg: &ExperimentConfig) -> Result<Report, HarnessError> {
    let grid = cfg.grid();
    let ns = scaling_ns(cfg);
    let r = cfg.r;
    let per = cfg.trials;
    let rows = trials(cfg, per * ns.len(), |i, s| {
        let n = ns[i / per.max(1)];
        let xi = FrequencySet::random(grid, n, s)?;
        let w = match cfg.weights {
            WeightKind::Ones => WeightFamily::constant(&xi, xi.k_bounds(), 1.0)?,
            WeightKind::Gaussian => WeightFamily::gaussian(&xi, xi.k_bounds(), s)?,
        };
        Ok(bourgain_experiment(&xi, &w, r, 1, s)?.remove(0))
    })?;
    let mut report = Report::new("bourgain", &BOURGAIN_HEADER);
    push_rows(&mut report, &rows);
    if !rows.is_empty() {
        slope_check(&mut report, &rows, &ns, r);
    }
    let tag = match cfg.weights {
        WeightKind::Ones => "ones",
        WeightKind::Gaussian => "gaussian",
    };
    measure_max(&mut report, format!("bourgain/r{r}/{tag}/{}", grid_tag(cfg)), rows.iter().map(|b| b.ratio));
    Ok(report)
}

/// Disjoint bands with Gaussian weights at a fixed set of `k`.
pub(super) fn disjoint_bands(cfg: &ExperimentConfig) -> Result<Report, HarnessError> {
    let grid = cfg.grid();
    let ns = scaling_ns(cfg);
    let r = cfg.r;
    let per = cfg.trials;
    let levels = grid.bits() as usize + 1;
    let rows = trials(cfg, per * ns.len(), |i, s| {
        let bands = DisjointBands::random(grid, ns[i / per.max(1)], levels, s)?;
        Ok(bands.experiment(r, 1, s)?.remove(0))
    })?;
    let mut report = Report::new("disjoint-bands", &BOURGAIN_HEADER);
    push_rows(&mut report, &rows);
    measure_max(&mut report, format!("disjoint-bands/r{r}/{}", grid_tag(cfg)), rows.iter().map(|b| b.ratio));
    Ok(report)
}

/// Relative tolerance of the three-way ordering.
pub const ORDER_TOL: f64 = 1e-9;

/// Largest accepted `1 - lower / oracle`.
pub const ORACLE_GAP: f64 = 0.05;

fn tiny_family(cfg: &ExperimentConfig, seed: u64) -> Result<MultiplierFamily, HarnessError> {
    let grid = cfg.grid();
    let dual = grid.dual();
    let mut rng = stream_rng(seed, 0);
    let members = rng.random_range(1..=4usize);
    let fam = (0..members)
        .map(|_| match rng.random_range(0..3) {
            0 => Ok((0..grid.cells()).map(|_| StandardNormal.sample(&mut rng)).collect()),
            1 => {
                let iv = random_interval(&dual, &mut rng);
                band_multiplier(&grid, &[(iv, 1.0)])
            }
            _ => Ok((0..grid.cells()).map(|_| rng.random_range(-1..=1) as f64).collect()),
        })
        .collect::<walsh_tf::Result<Vec<Vec<f64>>>>()?;
    Ok(MultiplierFamily::new(grid, fam)?)
}

pub(super) fn oracle_crosscheck(cfg: &ExperimentConfig) -> Result<Report, HarnessError> {
    let restarts = cfg.restarts.unwrap_or(32);
    let rows = trials(cfg, cfg.trials, |t, s| {
        let fam = tiny_family(cfg, s)?;
        let lower = m2star_lower(&fam, restarts, s).value;
        let upper = m2star_upper(&fam);
        let oracle = match m2star_oracle(&fam) {
            Ok(v) => Some(v),
            Err(Error::InstanceTooLarge(_)) => None,
            Err(e) => return Err(e.into()),
        };
        Ok((t, s, fam.len(), lower, oracle, upper))
    })?;
    let mut report = Report::new("oracle-crosscheck", &["trial", "seed", "members", "lower", "oracle", "upper", "gap"]);
    let (mut order_bad, mut gap_bad, mut skipped) = (0, 0, 0);
    for &(t, s, m, lower, oracle, upper) in &rows {
        let gap = oracle.map(|o| if o == 0.0 { 0.0 } else { 1.0 - lower / o });
        match oracle {
            Some(o) => {
                let slack = |v: f64| v * (1.0 + ORDER_TOL) + 1e-12;
                order_bad += usize::from(lower > slack(o) || o > slack(upper));
                gap_bad += usize::from(gap.unwrap() > ORACLE_GAP);
            }
            None => skipped += 1,
        }
        let text = |v: Option<f64>| v.map_or(String::new(), fmt_f64);
        report.push_row(
            vec![t.to_string(), s.to_string(), m.to_string(), fmt_f64(lower), text(oracle), fmt_f64(upper), text(gap)],
            json!({"trial": t, "seed": s, "members": m, "lower": lower, "oracle": oracle, "upper": upper}),
        );
    }
    report.check("lower <= oracle <= upper", order_bad == 0, format!("{order_bad} violations, {skipped} instances above the oracle limit"));
    report.check("lower within 5% of oracle", gap_bad == 0, format!("{gap_bad} violations"));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_a_power_law() {
        let pts: Vec<(f64, f64)> = [2.0, 4.0, 8.0].iter().map(|&n: &f64| (n, 3.0 * n.powf(0.3))).collect();
        assert!((log_log_slope(&pts) - 0.3).abs() < 1e-12);
    }
}
