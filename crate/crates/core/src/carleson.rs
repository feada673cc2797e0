//! The Walsh model operators
//!
//! `W f(x) = ‖Σ_{P ∈ S} ⟨f, w_{P₁}⟩ w_{P₁}(x) 1_{ω_{P,2}}(θ)‖_{L^∞_θ}` and
//! `W^max f(x) = ‖(Σ_{P ∈ S, |I_P| < 2^k} ⟨f, w_{P₁}⟩ w_{P₁}(x) 1_{ω_{P,2}}(θ))_k‖_{M₂*(θ)}`,
//! the pointwise bound for forests of 2-trees, and the weak-type experiment.
//!
//! Every multiplier is piecewise constant on the frequency cells of the grid,
//! so the `θ` suprema are finite maxima.

use rayon::prelude::*;

use crate::dyadic::{Grid, StepFunction};
use crate::error::{Error, Result};
use crate::multiplier::{
    m2star_lower, m2star_oracle, m2star_upper, oracle_assignments, MultiplierFamily,
};
use crate::rng::derive_seed;
use crate::size::{
    collection_size_with, exceptional_counting, exceptional_maximal, exceptional_variation,
    ExceptionalSet,
};
use crate::tiles::{tile_le, wave_packet_at, Bitile, Forest, Rect, TileCoefficients};

/// `k ↦ m_k(θ)` at one point, one member per distinct truncation.
#[derive(Debug, Clone)]
pub struct PointMultiplierFamily {
    pub x: usize,
    /// `keys[i]` is the smallest `k` at which `members[i]` is the truncation.
    /// The first member is the empty sum, the last one the full sum.
    pub keys: Vec<i32>,
    pub family: MultiplierFamily,
}

impl PointMultiplierFamily {
    pub fn full_sum(&self) -> &[f64] {
        self.family.members().last().expect("the empty sum is always present")
    }

    /// `m_k` for any integer `k`.
    pub fn member_at(&self, k: i32) -> &[f64] {
        let i = self.keys.iter().rposition(|&key| key <= k).unwrap_or(0);
        &self.family.members()[i]
    }
}

/// Coefficients `a_P = ⟨f, w_{P₁}⟩` read from a precomputed table.
fn lower_coeff(coeffs: &TileCoefficients, p: &Bitile) -> Result<f64> {
    coeffs.lower(p).ok_or(Error::OutsideGrid {
        time: p.time(),
        freq: p.freq(),
    })
}

/// `m_k(θ) = Σ_{P ∈ S, |I_P| < 2^k} a_P w_{P₁}(x) 1_{ω_{P,2}}(θ)` at cell `x`.
pub fn multiplier_family_at_x(
    bitiles: &[Bitile],
    f: &StepFunction,
    x: usize,
) -> Result<PointMultiplierFamily> {
    multiplier_family_at_x_with(bitiles, &TileCoefficients::new(f)?, x)
}

pub fn multiplier_family_at_x_with(
    bitiles: &[Bitile],
    coeffs: &TileCoefficients,
    x: usize,
) -> Result<PointMultiplierFamily> {
    let grid = coeffs.grid();
    let dual = grid.dual();
    let mut terms: Vec<(i32, f64, std::ops::Range<usize>)> = Vec::new();
    for p in bitiles {
        let v = wave_packet_at(&p.lower(), &grid, x);
        if v == 0.0 {
            continue;
        }
        let band = dual.cell_range(&p.freq_upper()).ok_or(Error::OutsideGrid {
            time: p.time(),
            freq: p.freq(),
        })?;
        terms.push((p.scale(), lower_coeff(coeffs, p)? * v, band));
    }
    terms.sort_by_key(|t| t.0);
    let mut current = vec![0.0; grid.cells()];
    let mut keys = vec![grid.min_scale() + 1];
    let mut members = vec![current.clone()];
    let mut i = 0;
    while i < terms.len() {
        let scale = terms[i].0;
        while i < terms.len() && terms[i].0 == scale {
            let (_, a, band) = &terms[i];
            for t in band.clone() {
                current[t] += a;
            }
            i += 1;
        }
        keys.push(scale + 1);
        members.push(current.clone());
    }
    Ok(PointMultiplierFamily {
        x,
        keys,
        family: MultiplierFamily::new(grid, members)?,
    })
}

/// `W f`: the largest full-sum multiplier value over the frequency cells.
pub fn carleson_w(bitiles: &[Bitile], f: &StepFunction) -> Result<StepFunction> {
    carleson_w_with(bitiles, &TileCoefficients::new(f)?)
}

pub fn carleson_w_with(bitiles: &[Bitile], coeffs: &TileCoefficients) -> Result<StepFunction> {
    let grid = coeffs.grid();
    let values = (0..grid.cells())
        .into_par_iter()
        .map(|x| {
            let fam = multiplier_family_at_x_with(bitiles, coeffs, x)?;
            Ok(fam.full_sum().iter().fold(0.0f64, |a, v| a.max(v.abs())))
        })
        .collect::<Result<Vec<f64>>>()?;
    StepFunction::scalar(grid, values)
}

/// How `W^max` evaluates the `M₂*` norm at each point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EstimatorMode {
    /// Ascent lower bound.
    Lower,
    /// Exact oracle; fails on instances above the oracle limit.
    Oracle,
    /// Oracle up to [`AUTO_ORACLE_LIMIT`] assignments, ascent elsewhere.
    #[default]
    Auto,
}

/// Assignment budget of the oracle in [`EstimatorMode::Auto`].
pub const AUTO_ORACLE_LIMIT: u128 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EstimatorOptions {
    pub mode: EstimatorMode,
    pub restarts: usize,
    /// Point `x` uses restart seeds derived from `derive_seed(seed, x)`.
    pub seed: u64,
}

impl Default for EstimatorOptions {
    fn default() -> Self {
        Self {
            mode: EstimatorMode::Auto,
            restarts: 16,
            seed: 0,
        }
    }
}

/// `W^max f` as certified lower bounds with an upper bound at each point.
#[derive(Debug, Clone)]
pub struct WmaxReport {
    pub grid: Grid,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// The lower bound is the exact value.
    pub exact: Vec<bool>,
}

impl WmaxReport {
    pub fn lower_function(&self) -> StepFunction {
        StepFunction::scalar(self.grid, self.lower.clone()).expect("grid sized")
    }

    pub fn upper_function(&self) -> StepFunction {
        StepFunction::scalar(self.grid, self.upper.clone()).expect("grid sized")
    }
}

fn estimate(fam: &MultiplierFamily, opts: &EstimatorOptions, x: usize) -> Result<(f64, bool)> {
    let nonzero: Vec<&Vec<f64>> = fam.members().iter().filter(|m| m.iter().any(|&v| v != 0.0)).collect();
    let sup = |m: &Vec<f64>| m.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if nonzero.is_empty() {
        return Ok((0.0, true));
    }
    if nonzero.windows(2).all(|w| w[0] == w[1]) {
        return Ok((sup(nonzero[0]), true));
    }
    let lower = || m2star_lower(fam, opts.restarts, derive_seed(opts.seed, x as u64)).value;
    match opts.mode {
        EstimatorMode::Lower => Ok((lower(), false)),
        EstimatorMode::Oracle => Ok((m2star_oracle(fam)?, true)),
        EstimatorMode::Auto if oracle_assignments(fam, AUTO_ORACLE_LIMIT) <= AUTO_ORACLE_LIMIT => {
            Ok((m2star_oracle(fam)?, true))
        }
        EstimatorMode::Auto => Ok((lower(), false)),
    }
}

/// `W^max f = x ↦ ‖(m_k)_k‖_{M₂*}` for the point families of
/// [`multiplier_family_at_x`].
pub fn carleson_wmax(
    bitiles: &[Bitile],
    f: &StepFunction,
    opts: &EstimatorOptions,
) -> Result<WmaxReport> {
    carleson_wmax_with(bitiles, &TileCoefficients::new(f)?, opts)
}

pub fn carleson_wmax_with(
    bitiles: &[Bitile],
    coeffs: &TileCoefficients,
    opts: &EstimatorOptions,
) -> Result<WmaxReport> {
    let grid = coeffs.grid();
    let per_x = (0..grid.cells())
        .into_par_iter()
        .map(|x| {
            let fam = multiplier_family_at_x_with(bitiles, coeffs, x)?;
            let (value, exact) = estimate(&fam.family, opts, x)?;
            Ok((value, m2star_upper(&fam.family), exact))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(WmaxReport {
        grid,
        lower: per_x.iter().map(|t| t.0).collect(),
        upper: per_x.iter().map(|t| t.1).collect(),
        exact: per_x.iter().map(|t| t.2).collect(),
    })
}

/// `sup_P |a_P| / |I_P|^{1/2}`.
pub fn coefficient_sup(bitiles: &[Bitile], coeffs: &TileCoefficients) -> Result<f64> {
    bitiles.iter().try_fold(0.0f64, |acc, p| {
        Ok(acc.max(lower_coeff(coeffs, p)?.abs() / p.time().length().sqrt()))
    })
}

/// Inputs of the pointwise estimate for a forest of 2-trees.
#[derive(Debug, Clone, Copy)]
pub struct TreeBoundParams {
    pub r: f64,
    pub beta: f64,
    pub gamma: f64,
    pub sigma: f64,
}

impl TreeBoundParams {
    /// `(σ + γ) β^{r/4 - 1/2}`.
    pub fn denominator(&self) -> f64 {
        (self.sigma + self.gamma) * self.beta.powf(self.r / 4.0 - 0.5)
    }
}

/// `W^max` over a forest of 2-trees divided by `(σ + γ) β^{r/4-1/2}`, with
/// the exceptional sets `E^{(1)}` (counting function above `β`) and `E^{(2)}`
/// (some tree's truncations have `V^r` norm above `γ`).
#[derive(Debug, Clone)]
pub struct TreeBoundReport {
    pub counting_set: ExceptionalSet,
    pub variation_set: ExceptionalSet,
    pub wmax: WmaxReport,
    /// `None` on `E^{(1)} ∪ E^{(2)}`.
    pub ratios: Vec<Option<f64>>,
}

impl TreeBoundReport {
    pub fn max_ratio(&self) -> f64 {
        self.ratios.iter().flatten().copied().fold(0.0, f64::max)
    }
}

fn check_tree_params(
    bitiles: &[Bitile],
    coeffs: &TileCoefficients,
    params: &TreeBoundParams,
) -> Result<()> {
    if params.r <= 2.0 || params.beta < 1.0 || params.gamma <= 0.0 {
        return Err(Error::PreconditionViolated(format!(
            "need r > 2, β ≥ 1, γ > 0; got r = {}, β = {}, γ = {}",
            params.r, params.beta, params.gamma
        )));
    }
    let s = coefficient_sup(bitiles, coeffs)?;
    if s > params.sigma * (1.0 + 1e-12) {
        return Err(Error::PreconditionViolated(format!(
            "sup |a_P| / |I_P|^(1/2) = {s} exceeds σ = {}",
            params.sigma
        )));
    }
    Ok(())
}

/// Ratios at every cell outside the exceptional sets.
pub fn tree_bound_ratios(
    bitiles: &[Bitile],
    forest: &Forest,
    f: &StepFunction,
    params: &TreeBoundParams,
    opts: &EstimatorOptions,
) -> Result<TreeBoundReport> {
    let coeffs = TileCoefficients::new(f)?;
    check_tree_params(bitiles, &coeffs, params)?;
    let grid = f.grid();
    let a = |p: &Bitile| coeffs.lower(p).unwrap_or(0.0);
    let counting_set = exceptional_counting(forest, params.beta, &grid);
    let variation_set = exceptional_variation(forest, &a, params.gamma, params.r, &grid);
    let wmax = carleson_wmax_with(bitiles, &coeffs, opts)?;
    let denom = params.denominator();
    let ratios = (0..grid.cells())
        .map(|c| {
            (!counting_set.contains(c) && !variation_set.contains(c)).then(|| wmax.lower[c] / denom)
        })
        .collect();
    Ok(TreeBoundReport {
        counting_set,
        variation_set,
        wmax,
        ratios,
    })
}

/// The ratio at one cell; an error if `x ∈ E^{(1)} ∪ E^{(2)}`.
#[allow(clippy::too_many_arguments)]
pub fn pointwise_tree_bound_check(
    bitiles: &[Bitile],
    forest: &Forest,
    f: &StepFunction,
    params: &TreeBoundParams,
    x: usize,
    opts: &EstimatorOptions,
) -> Result<f64> {
    let coeffs = TileCoefficients::new(f)?;
    check_tree_params(bitiles, &coeffs, params)?;
    let grid = f.grid();
    let a = |p: &Bitile| coeffs.lower(p).unwrap_or(0.0);
    if exceptional_counting(forest, params.beta, &grid).contains(x) {
        return Err(Error::PreconditionViolated(format!("cell {x} lies in E(1)")));
    }
    if exceptional_variation(forest, &a, params.gamma, params.r, &grid).contains(x) {
        return Err(Error::PreconditionViolated(format!("cell {x} lies in E(2)")));
    }
    let fam = multiplier_family_at_x_with(bitiles, &coeffs, x)?;
    Ok(estimate(&fam.family, opts, x)?.0 / params.denominator())
}

/// `{P ∈ S : x ∈ I_P, θ ∈ ω_{P,2}}` for time cell `x` and frequency cell `t`,
/// finest scale first.
pub fn frequency_stack(bitiles: &[Bitile], grid: &Grid, x: usize, t: usize) -> Vec<Bitile> {
    let xp = grid.cell_point(x);
    let theta = grid.dual().cell_point(t);
    let mut out: Vec<Bitile> = bitiles
        .iter()
        .filter(|p| p.time().contains_point(&xp) && p.freq_upper().contains_point(&theta))
        .copied()
        .collect();
    out.sort_by_key(|p| p.scale());
    out
}

/// Every pair of the collection is comparable under `≤`.
pub fn is_totally_ordered(bitiles: &[Bitile]) -> bool {
    bitiles.iter().enumerate().all(|(i, p)| {
        bitiles[i + 1..]
            .iter()
            .all(|q| tile_le(p, q) || tile_le(q, p))
    })
}

/// One `(p, λ)` cell of the weak-type experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakTypeRow {
    pub grid_j: u32,
    pub grid_k: u32,
    pub p: f64,
    pub lambda: f64,
    pub meas_f: f64,
    /// `m{W^max 1_F > λ}`, measured with the certified lower bounds.
    pub meas_level_set: f64,
    /// `λ^p m{W^max 1_F > λ} / |F|`; zero for empty `F`.
    pub ratio: f64,
    pub seed: u64,
    pub detail: WeakTypeDetail,
}

/// Diagnostics of the two regimes.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakTypeDetail {
    /// `m{x : upper bound > λ}`.
    pub meas_level_set_upper: f64,
    /// For `λ ≤ 1`: `|E|` with `E = {M_p 1_F ≥ λ}`.
    pub meas_excluded: Option<f64>,
    /// For `λ ≤ 1`: `m({W^max 1_F > λ} \ E)`.
    pub meas_level_set_outside: Option<f64>,
    /// For `λ > 1`: the size of `S` with respect to `λ^{-1} 1_F`.
    pub size_scaled: Option<f64>,
}

/// `m{W^max 1_F > λ}` against `|F| / λ^p` for every `p` and `λ`. `W^max 1_F`
/// is computed once per `F`.
pub fn weak_type_experiment(
    bitiles: &[Bitile],
    set: &ExceptionalSet,
    ps: &[f64],
    lambdas: &[f64],
    opts: &EstimatorOptions,
) -> Result<Vec<WeakTypeRow>> {
    if let Some(&p) = ps.iter().find(|&&p| p <= 1.0) {
        return Err(Error::PreconditionViolated(format!("p = {p} must exceed 1")));
    }
    if let Some(&l) = lambdas.iter().find(|&&l| l <= 0.0) {
        return Err(Error::PreconditionViolated(format!("λ = {l} must be positive")));
    }
    let grid = set.grid();
    let indicator = set.indicator();
    let coeffs = TileCoefficients::new(&indicator)?;
    let wmax = carleson_wmax_with(bitiles, &coeffs, opts)?;
    let w = grid.cell_width();
    let meas_f = set.measure();
    let base_size = collection_size_with(bitiles, &coeffs)?;
    let mut rows = Vec::with_capacity(ps.len() * lambdas.len());
    for &p in ps {
        for &lambda in lambdas {
            let above: Vec<bool> = wmax.lower.iter().map(|&v| v > lambda).collect();
            let meas_level_set = above.iter().filter(|&&b| b).count() as f64 * w;
            let meas_level_set_upper = wmax.upper.iter().filter(|&&v| v > lambda).count() as f64 * w;
            let (meas_excluded, meas_level_set_outside, size_scaled) = if lambda <= 1.0 {
                let e = exceptional_maximal(set, p, lambda);
                let outside = (0..grid.cells()).filter(|&c| above[c] && !e.contains(c)).count();
                (Some(e.measure()), Some(outside as f64 * w), None)
            } else {
                (None, None, Some(base_size / lambda))
            };
            let ratio = if meas_f == 0.0 {
                0.0
            } else {
                lambda.powf(p) * meas_level_set / meas_f
            };
            rows.push(WeakTypeRow {
                grid_j: grid.j,
                grid_k: grid.k,
                p,
                lambda,
                meas_f,
                meas_level_set,
                ratio,
                seed: opts.seed,
                detail: WeakTypeDetail {
                    meas_level_set_upper,
                    meas_excluded,
                    meas_level_set_outside,
                    size_scaled,
                },
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::DyadicInterval;
    use crate::tiles::{grid_bitiles, wave_packet};

    fn ramp(grid: Grid) -> StepFunction {
        let v = (0..grid.cells()).map(|c| ((c * 7 + 3) % 5) as f64 - 2.0).collect();
        StepFunction::scalar(grid, v).unwrap()
    }

    #[test]
    fn family_stabilizes() {
        let g = Grid::new(2, 2);
        let s = grid_bitiles(&g);
        let f = ramp(g);
        for x in 0..g.cells() {
            let fam = multiplier_family_at_x(&s, &f, x).unwrap();
            assert!(fam.member_at(-10).iter().all(|&v| v == 0.0));
            assert_eq!(fam.member_at(g.min_scale()), fam.member_at(-10));
            assert_eq!(fam.member_at(g.max_scale() + 1), fam.full_sum());
            assert_eq!(fam.member_at(100), fam.full_sum());
            // scales 1 - k ..= j
            assert!(fam.family.len() <= (g.bits() as usize) + 1);
        }
    }

    #[test]
    fn single_bitile_assembly() {
        let g = Grid::new(2, 2);
        let p = Bitile::from_indices(0, 1, 1);
        let f = wave_packet(&p.lower(), &g).unwrap();
        let band = g.dual().cell_range(&p.freq_upper()).unwrap();
        for x in 0..g.cells() {
            let fam = multiplier_family_at_x(&[p], &f, x).unwrap();
            let w = wave_packet_at(&p.lower(), &g, x);
            let top = fam.member_at(1);
            for t in 0..g.cells() {
                let want = if band.contains(&t) { w } else { 0.0 };
                assert!((top[t] - want).abs() < 1e-12);
            }
            assert!(fam.member_at(0).iter().all(|&v| v == 0.0));
        }
        let wf = carleson_w(&[p], &f).unwrap();
        let want = StepFunction::indicator(g, &p.time()).unwrap();
        assert!(wf.max_abs_diff(&want).unwrap() < 1e-12);
        let opts = EstimatorOptions {
            mode: EstimatorMode::Oracle,
            ..Default::default()
        };
        let wm = carleson_wmax(&[p], &f, &opts).unwrap();
        for x in 0..g.cells() {
            assert!((wm.lower[x] - want.values()[x]).abs() < 1e-12);
            assert!(wm.exact[x]);
        }
    }

    #[test]
    fn empty_collection() {
        let g = Grid::new(1, 1);
        let f = ramp(g);
        assert_eq!(carleson_w(&[], &f).unwrap().sup_norm(), 0.0);
        let wm = carleson_wmax(&[], &f, &EstimatorOptions::default()).unwrap();
        assert!(wm.lower.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn wmax_dominates_w_with_oracle() {
        let g = Grid::new(2, 2);
        let s: Vec<Bitile> = grid_bitiles(&g).into_iter().step_by(5).collect();
        let f = ramp(g);
        let w = carleson_w(&s, &f).unwrap();
        let wm = carleson_wmax(&s, &f, &EstimatorOptions::default()).unwrap();
        for x in 0..g.cells() {
            assert!(wm.lower[x] <= wm.upper[x] + 1e-9);
            if wm.exact[x] {
                assert!(wm.lower[x] >= w.values()[x] - 1e-9);
            }
        }
    }

    #[test]
    fn stacks_are_chains() {
        let g = Grid::new(2, 2);
        let s = grid_bitiles(&g);
        for x in 0..g.cells() {
            for t in 0..g.cells() {
                assert!(is_totally_ordered(&frequency_stack(&s, &g, x, t)));
            }
        }
    }

    #[test]
    fn weak_type_trivial_cases() {
        let g = Grid::new(2, 2);
        let s = grid_bitiles(&g);
        let empty = ExceptionalSet::empty(g);
        let rows = weak_type_experiment(&s, &empty, &[2.0], &[0.5, 2.0], &Default::default()).unwrap();
        assert!(rows.iter().all(|r| r.meas_level_set == 0.0 && r.ratio == 0.0));

        let f = ExceptionalSet::from_intervals(g, &[DyadicInterval::new(0, 1)]).unwrap();
        let rows = weak_type_experiment(&s, &f, &[1.5], &[1e6], &Default::default()).unwrap();
        assert_eq!(rows[0].meas_level_set, 0.0);
        assert!(weak_type_experiment(&s, &f, &[1.0], &[1.0], &Default::default()).is_err());
    }

    #[test]
    fn tree_bound_checks_preconditions() {
        let g = Grid::new(2, 2);
        let p = Bitile::from_indices(0, 0, 1);
        let f = wave_packet(&p.lower(), &g).unwrap();
        let tree = crate::tiles::Tree::maximal(
            p.time(),
            p.freq_upper().left(),
            &[p],
            crate::tiles::TreeKind::Two,
        );
        let forest = Forest::new(vec![tree]);
        let params = TreeBoundParams {
            r: 2.5,
            beta: 1.0,
            gamma: 10.0,
            sigma: 1.0,
        };
        let opts = EstimatorOptions::default();
        let ratio = pointwise_tree_bound_check(&[p], &forest, &f, &params, 0, &opts).unwrap();
        assert!(ratio.is_finite() && ratio > 0.0);
        let low_sigma = TreeBoundParams { sigma: 0.5, ..params };
        assert!(pointwise_tree_bound_check(&[p], &forest, &f, &low_sigma, 0, &opts).is_err());
        let tight = TreeBoundParams { gamma: 0.1, ..params };
        assert!(matches!(
            pointwise_tree_bound_check(&[p], &forest, &f, &tight, 0, &opts),
            Err(Error::PreconditionViolated(_))
        ));
        let zero = StepFunction::zeros(g, 1);
        assert_eq!(
            pointwise_tree_bound_check(&[p], &forest, &zero, &params, 0, &opts).unwrap(),
            0.0
        );
    }
}
