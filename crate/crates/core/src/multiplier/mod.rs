//! Band multipliers `Δ_k f = Σ_{ω ∈ Ω_k} ε_ω (f̂ 1_ω)ˇ` over a finite frequency
//! set, their weighted maximal bounds, covering chains and `M₂*` estimation.
//!
//! Frequencies are cells of the dual grid: on `Grid(j, k)` the frequency
//! domain is `[0, 2^k)` in cells of width `2^-j`, and `Ω_k` consists of
//! dyadic intervals of length `2^-k`, so `k` ranges over `[-K, J]`.

mod covering;
mod m2star;

use std::collections::{BTreeSet, HashMap};
use std::ops::RangeInclusive;

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::dyadic::{walsh_fourier, DyadicInterval, Grid, StepFunction};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, stream_rng};
use crate::variation::{variation_norm, KSequence};

pub use covering::{
    chain_decompose, cover_centers, covering_number, diameter, greedy_cover, ChainDecomposition,
    ChainLevel,
};
pub use m2star::{
    m2star_lower, m2star_lower_with, m2star_oracle, m2star_upper, oracle_assignments, M2StarEstimate,
    MultiplierFamily, ORACLE_LIMIT,
};

/// A finite set `Ξ` of frequencies, stored as dual-grid cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequencySet {
    grid: Grid,
    cells: Vec<usize>,
}

impl FrequencySet {
    /// `grid` is the time grid; `cells` index its dual grid. Duplicates are
    /// dropped.
    pub fn new(grid: Grid, cells: impl IntoIterator<Item = usize>) -> Result<Self> {
        let set: BTreeSet<usize> = cells.into_iter().collect();
        if let Some(&t) = set.iter().find(|&&t| t >= grid.cells()) {
            return Err(Error::MismatchedGrid {
                expected: grid.cells(),
                found: t,
            });
        }
        Ok(Self {
            grid,
            cells: set.into_iter().collect(),
        })
    }

    /// `n` distinct frequencies drawn uniformly.
    pub fn random(grid: Grid, n: usize, seed: u64) -> Result<Self> {
        if n > grid.cells() {
            return Err(Error::PreconditionViolated(format!(
                "{n} frequencies requested on {} cells",
                grid.cells()
            )));
        }
        let mut rng = stream_rng(seed, 0);
        let picked = rand::seq::index::sample(&mut rng, grid.cells(), n);
        Self::new(grid, picked)
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Valid values of `k`: interval lengths `2^-k` resolved by the dual grid.
    pub fn k_bounds(&self) -> RangeInclusive<i32> {
        -(self.grid.k as i32)..=self.grid.j as i32
    }

    /// `ω_{ξ,k}`, the interval of length `2^-k` containing the frequency of
    /// dual cell `t`.
    pub fn interval_of(&self, t: usize, k: i32) -> DyadicInterval {
        DyadicInterval::new(-k, (t >> (self.grid.j as i32 - k)) as u64)
    }

    fn check_k(&self, k: i32) -> Result<()> {
        if self.k_bounds().contains(&k) {
            Ok(())
        } else {
            Err(Error::PreconditionViolated(format!(
                "length 2^{} is not resolved by the frequency grid",
                -k
            )))
        }
    }
}

/// `Ω_k(Ξ)`: the dyadic intervals of length `2^-k` meeting `Ξ`, sorted.
pub fn omega_k(xi: &FrequencySet, k: i32) -> Result<Vec<DyadicInterval>> {
    xi.check_k(k)?;
    let mut out: Vec<DyadicInterval> = xi.cells.iter().map(|&t| xi.interval_of(t, k)).collect();
    out.dedup();
    Ok(out)
}

/// Weights `ε_ω` keyed by `(k, ω)` with `ω` of length `2^-k`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightFamily {
    k_range: RangeInclusive<i32>,
    weights: HashMap<(i32, DyadicInterval), f64>,
}

impl WeightFamily {
    pub fn new(k_range: RangeInclusive<i32>) -> Self {
        Self {
            k_range,
            weights: HashMap::new(),
        }
    }

    /// `ε_ω(k) = value(k, ω)` for every `ω ∈ Ω_k(Ξ)`, `k` in range.
    pub fn from_fn(
        xi: &FrequencySet,
        k_range: RangeInclusive<i32>,
        mut value: impl FnMut(i32, &DyadicInterval) -> f64,
    ) -> Result<Self> {
        let mut w = Self::new(k_range.clone());
        for k in k_range {
            for om in omega_k(xi, k)? {
                let v = value(k, &om);
                w.insert(k, om, v)?;
            }
        }
        Ok(w)
    }

    pub fn constant(xi: &FrequencySet, k_range: RangeInclusive<i32>, c: f64) -> Result<Self> {
        Self::from_fn(xi, k_range, |_, _| c)
    }

    /// Independent standard Gaussian weights.
    pub fn gaussian(xi: &FrequencySet, k_range: RangeInclusive<i32>, seed: u64) -> Result<Self> {
        let mut rng = stream_rng(seed, 1);
        Self::from_fn(xi, k_range, |_, _| StandardNormal.sample(&mut rng))
    }

    pub fn insert(&mut self, k: i32, omega: DyadicInterval, value: f64) -> Result<()> {
        if omega.scale != -k {
            return Err(Error::PreconditionViolated(format!(
                "{omega:?} does not have length 2^{}",
                -k
            )));
        }
        self.weights.insert((k, omega), value);
        Ok(())
    }

    pub fn get(&self, k: i32, omega: &DyadicInterval) -> Option<f64> {
        self.weights.get(&(k, *omega)).copied()
    }

    pub fn k_range(&self) -> RangeInclusive<i32> {
        self.k_range.clone()
    }

    /// Every keyed interval contains a point of `Ξ`.
    pub fn is_supported_on(&self, xi: &FrequencySet) -> bool {
        self.weights.keys().all(|(k, om)| {
            xi.cells.iter().any(|&t| xi.interval_of(t, *k) == *om)
        })
    }
}

/// `Σ_ω ε_ω 1_ω` as a vector over the dual cells.
pub fn band_multiplier(grid: &Grid, bands: &[(DyadicInterval, f64)]) -> Result<Vec<f64>> {
    let dual = grid.dual();
    let mut m = vec![0.0; grid.cells()];
    for (om, e) in bands {
        let range = dual.cell_range(om).ok_or(Error::OutsideGrid {
            time: *om,
            freq: *om,
        })?;
        for t in range {
            m[t] += e;
        }
    }
    Ok(m)
}

fn delta_bands(w: &WeightFamily, xi: &FrequencySet, k: i32) -> Result<Vec<(DyadicInterval, f64)>> {
    if !w.k_range.contains(&k) {
        return Err(Error::PreconditionViolated(format!("k = {k} outside the weight range")));
    }
    omega_k(xi, k)?
        .into_iter()
        .map(|om| w.get(k, &om).map(|e| (om, e)).ok_or(Error::MissingWeight(om, k)))
        .collect()
}

/// The multiplier of `Δ_k`.
pub fn delta_multiplier(w: &WeightFamily, xi: &FrequencySet, k: i32) -> Result<Vec<f64>> {
    band_multiplier(&xi.grid, &delta_bands(w, xi, k)?)
}

/// `Δ_k f = Σ_{ω ∈ Ω_k} ε_ω (f̂ 1_ω)ˇ`.
pub fn delta_k(f: &StepFunction, w: &WeightFamily, xi: &FrequencySet, k: i32) -> Result<StepFunction> {
    check_grid(f, &xi.grid)?;
    let m = delta_multiplier(w, xi, k)?;
    Ok(walsh_fourier(&walsh_fourier(f).modulate(&m)?))
}

fn check_grid(f: &StepFunction, grid: &Grid) -> Result<()> {
    f.require_scalar()?;
    if f.grid() != *grid {
        return Err(Error::MismatchedGrid {
            expected: grid.cells(),
            found: f.grid().cells(),
        });
    }
    Ok(())
}

/// The family `k ↦ Δ_k` over the weight range.
pub fn delta_family(w: &WeightFamily, xi: &FrequencySet) -> Result<MultiplierFamily> {
    let members = w
        .k_range()
        .map(|k| delta_multiplier(w, xi, k))
        .collect::<Result<Vec<_>>>()?;
    MultiplierFamily::new(xi.grid, members)
}

/// `sup_{ξ ∈ Ξ} ‖ε_{ω_{ξ,k}}‖_{V^r(k)}`, the chain for each `ξ` traversed in
/// decreasing `k`.
pub fn weight_variation(w: &WeightFamily, xi: &FrequencySet, r: f64) -> Result<f64> {
    let keys: Vec<i32> = w.k_range().rev().collect();
    let mut best: f64 = 0.0;
    for &t in &xi.cells {
        let values = keys
            .iter()
            .map(|&k| {
                let om = xi.interval_of(t, k);
                w.get(k, &om).ok_or(Error::MissingWeight(om, k))
            })
            .collect::<Result<Vec<_>>>()?;
        if values.is_empty() {
            continue;
        }
        best = best.max(variation_norm(&KSequence::scalar(keys.clone(), values)?, r));
    }
    Ok(best)
}

/// One random trial of a maximal band-multiplier bound.
#[derive(Debug, Clone, PartialEq)]
pub struct BourgainRow {
    pub n: usize,
    pub r: f64,
    pub sigma: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub seed: u64,
}

/// `N^{r/4 - 1/2}`.
pub fn bourgain_factor(n: usize, r: f64) -> f64 {
    (n as f64).powf(r / 4.0 - 0.5)
}

fn gaussian_function(grid: Grid, seed: u64) -> StepFunction {
    let mut rng = stream_rng(seed, 0);
    let v = (0..grid.cells()).map(|_| StandardNormal.sample(&mut rng)).collect();
    StepFunction::scalar(grid, v).expect("grid sized")
}

fn maximal_rows(
    family: &MultiplierFamily,
    n: usize,
    r: f64,
    sigma: f64,
    trials: usize,
    seed: u64,
) -> Vec<BourgainRow> {
    (0..trials)
        .into_par_iter()
        .map(|trial| {
            let s = derive_seed(seed, trial as u64);
            let f = gaussian_function(family.grid(), s);
            let lhs = family.maximal_norm(&f).expect("same grid");
            let rhs = sigma * bourgain_factor(n, r) * f.l2_norm();
            let ratio = if lhs == 0.0 { 0.0 } else { lhs / rhs };
            BourgainRow {
                n,
                r,
                sigma,
                lhs,
                rhs,
                ratio,
                seed: s,
            }
        })
        .collect()
}

/// `‖sup_k |Δ_k f|‖₂ / (σ N^{r/4-1/2} ‖f‖₂)` over Gaussian `f`, with
/// `σ = weight_variation(W, Ξ, r)`. Rows are in trial order.
pub fn bourgain_experiment(
    xi: &FrequencySet,
    w: &WeightFamily,
    r: f64,
    trials: usize,
    seed: u64,
) -> Result<Vec<BourgainRow>> {
    require_r(r)?;
    let sigma = weight_variation(w, xi, r)?;
    let family = delta_family(w, xi)?;
    Ok(maximal_rows(&family, xi.len(), r, sigma, trials, seed))
}

fn require_r(r: f64) -> Result<()> {
    if r > 2.0 {
        Ok(())
    } else {
        Err(Error::PreconditionViolated(format!("r = {r} must exceed 2")))
    }
}

/// Fixed pairwise disjoint bands with weights `ε_{k,ω}` depending on `k`.
#[derive(Debug, Clone)]
pub struct DisjointBands {
    grid: Grid,
    bands: Vec<DyadicInterval>,
    /// `weights[i][b]`: the weight of band `b` at the `i`-th `k`, in decreasing `k`.
    weights: Vec<Vec<f64>>,
    keys: Vec<i32>,
}

impl DisjointBands {
    pub fn new(
        grid: Grid,
        bands: Vec<DyadicInterval>,
        keys: Vec<i32>,
        weights: Vec<Vec<f64>>,
    ) -> Result<Self> {
        for (a, x) in bands.iter().enumerate() {
            if grid.dual().cell_range(x).is_none() {
                return Err(Error::OutsideGrid { time: *x, freq: *x });
            }
            if bands[a + 1..].iter().any(|y| x.intersects(y)) {
                return Err(Error::PreconditionViolated("bands must be disjoint".into()));
            }
        }
        if weights.len() != keys.len() || weights.iter().any(|w| w.len() != bands.len()) {
            return Err(Error::DimensionMismatch(keys.len() * bands.len(), weights.len()));
        }
        Ok(Self {
            grid,
            bands,
            weights,
            keys,
        })
    }

    /// `n` random disjoint bands at random scales and Gaussian weights at
    /// `levels` values of `k`.
    pub fn random(grid: Grid, n: usize, levels: usize, seed: u64) -> Result<Self> {
        let dual = grid.dual();
        let mut rng = stream_rng(seed, 2);
        let mut cells: Vec<usize> = rand::seq::index::sample(&mut rng, grid.cells(), n.min(grid.cells())).into_vec();
        cells.sort_unstable();
        let mut bands: Vec<DyadicInterval> = Vec::new();
        for t in cells {
            let base = dual.cell_interval(t);
            let up = rand::Rng::random_range(&mut rng, 0..=dual.bits() as i32);
            let mut iv = base;
            for _ in 0..up {
                let p = iv.parent();
                if bands.iter().any(|b| b.intersects(&p)) || dual.cell_range(&p).is_none() {
                    break;
                }
                iv = p;
            }
            if !bands.iter().any(|b| b.intersects(&iv)) {
                bands.push(iv);
            }
        }
        let keys: Vec<i32> = (0..levels as i32).rev().collect();
        let weights = keys
            .iter()
            .map(|_| bands.iter().map(|_| StandardNormal.sample(&mut rng)).collect())
            .collect();
        Self::new(grid, bands, keys, weights)
    }

    pub fn bands(&self) -> &[DyadicInterval] {
        &self.bands
    }

    pub fn family(&self) -> Result<MultiplierFamily> {
        let members = self
            .weights
            .iter()
            .map(|w| {
                let pairs: Vec<(DyadicInterval, f64)> =
                    self.bands.iter().copied().zip(w.iter().copied()).collect();
                band_multiplier(&self.grid, &pairs)
            })
            .collect::<Result<Vec<_>>>()?;
        MultiplierFamily::new(self.grid, members)
    }

    /// `sup_ω ‖ε_{k,ω}‖_{V^r(k)}`.
    pub fn weight_variation(&self, r: f64) -> f64 {
        (0..self.bands.len())
            .map(|b| {
                let v: Vec<f64> = self.weights.iter().map(|w| w[b]).collect();
                variation_norm(&KSequence::scalar(self.keys.clone(), v).expect("aligned"), r)
            })
            .fold(0.0, f64::max)
    }

    pub fn experiment(&self, r: f64, trials: usize, seed: u64) -> Result<Vec<BourgainRow>> {
        require_r(r)?;
        let family = self.family()?;
        Ok(maximal_rows(
            &family,
            self.bands.len(),
            r,
            self.weight_variation(r),
            trials,
            seed,
        ))
    }
}

/// The orthogonal splitting used to bound `sup_k |Δ_k f|` one cardinality
/// block at a time.
#[derive(Debug, Clone)]
pub struct RademacherMenshov {
    /// `k_0 < k_1 < ...`: the smallest `k` of each run of constant `|Ω_k|`.
    pub breakpoints: Vec<i32>,
    /// `f_j` with `f̂_j = (1_{∪Ω_{k_j}} - 1_{∪Ω_{k_{j+1}}}) f̂`, `Ω_{k_{b+1}} = ∅`.
    pub pieces: Vec<StepFunction>,
    /// `max_{i<j} |⟨f_i, f_j⟩|`.
    pub max_inner: f64,
    /// `max_k ‖Δ_k f - A_k - B_k‖_∞`.
    pub identity_error: f64,
    /// `‖sup_k |Δ_k f|‖₂`, `‖sup_k |A_k|‖₂` and `‖sup_k |B_k|‖₂`.
    pub norms: (f64, f64, f64),
}

/// For `k_j ≤ k < k_{j+1}` splits `Δ_k f = A_k + B_k` with
/// `A_k = (Σ_{ω' ∈ Ω_{k_{j+1}}} ε_{ω'(k)} 1_{ω'} Σ_{j' > j} f̂_{j'})ˇ` and
/// `B_k = (Σ_{ω ∈ Ω_k} ε_ω 1_ω f̂_j)ˇ`, where `ω'(k) ⊇ ω'` lies in `Ω_k`.
pub fn rademacher_menshov(
    f: &StepFunction,
    w: &WeightFamily,
    xi: &FrequencySet,
) -> Result<RademacherMenshov> {
    check_grid(f, &xi.grid)?;
    let grid = xi.grid;
    let ks: Vec<i32> = w.k_range().collect();
    let sizes = ks
        .iter()
        .map(|&k| omega_k(xi, k).map(|o| o.len()))
        .collect::<Result<Vec<_>>>()?;
    let mut breakpoints = Vec::new();
    for (i, &k) in ks.iter().enumerate() {
        if i == 0 || sizes[i] != sizes[i - 1] {
            breakpoints.push(k);
        }
    }
    let union = |k: Option<i32>| -> Result<Vec<f64>> {
        match k {
            None => Ok(vec![0.0; grid.cells()]),
            Some(k) => {
                let bands: Vec<_> = omega_k(xi, k)?.into_iter().map(|o| (o, 1.0)).collect();
                band_multiplier(&grid, &bands)
            }
        }
    };
    let spectrum = walsh_fourier(f);
    let next = |j: usize| breakpoints.get(j + 1).copied();
    let mut pieces = Vec::with_capacity(breakpoints.len());
    let mut piece_spectra = Vec::with_capacity(breakpoints.len());
    for (j, &kj) in breakpoints.iter().enumerate() {
        let a = union(Some(kj))?;
        let b = union(next(j))?;
        let mask: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
        let s = spectrum.modulate(&mask)?;
        pieces.push(walsh_fourier(&s));
        piece_spectra.push(s);
    }
    let mut max_inner: f64 = 0.0;
    for i in 0..pieces.len() {
        for j in i + 1..pieces.len() {
            max_inner = max_inner.max(pieces[i].inner(&pieces[j])?.abs());
        }
    }
    let zeros = StepFunction::zeros(grid, 1);
    let mut sup_d = vec![0.0f64; grid.cells()];
    let mut sup_a = sup_d.clone();
    let mut sup_b = sup_d.clone();
    let mut identity_error: f64 = 0.0;
    for &k in &ks {
        let j = breakpoints.iter().rposition(|&b| b <= k).expect("k_0 is the first key");
        let d = delta_k(f, w, xi, k)?;
        let bm = delta_multiplier(w, xi, k)?;
        let b_k = walsh_fourier(&piece_spectra[j].modulate(&bm)?);
        let a_k = match next(j) {
            None => zeros.clone(),
            Some(kn) => {
                let mut tail = StepFunction::zeros(grid.dual(), 1);
                for s in &piece_spectra[j + 1..] {
                    tail = tail.add(s)?;
                }
                let bands = omega_k(xi, kn)?
                    .into_iter()
                    .map(|o| {
                        let up = o.ancestor(-k);
                        w.get(k, &up).map(|e| (o, e)).ok_or(Error::MissingWeight(up, k))
                    })
                    .collect::<Result<Vec<_>>>()?;
                walsh_fourier(&tail.modulate(&band_multiplier(&grid, &bands)?)?)
            }
        };
        identity_error = identity_error.max(d.max_abs_diff(&a_k.add(&b_k)?)?);
        for (c, s) in sup_d.iter_mut().enumerate() {
            *s = s.max(d.values()[c].abs());
            sup_a[c] = sup_a[c].max(a_k.values()[c].abs());
            sup_b[c] = sup_b[c].max(b_k.values()[c].abs());
        }
    }
    let l2 = |v: Vec<f64>| StepFunction::scalar(grid, v).expect("grid sized").l2_norm();
    Ok(RademacherMenshov {
        breakpoints,
        pieces,
        max_inner,
        identity_error,
        norms: (l2(sup_d), l2(sup_a), l2(sup_b)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp(grid: Grid) -> StepFunction {
        let v = (0..grid.cells()).map(|c| ((c * 13 + 5) % 11) as f64 - 5.0).collect();
        StepFunction::scalar(grid, v).unwrap()
    }

    #[test]
    fn omega_examples() {
        let g = Grid::new(1, 2);
        // dual cells have width 1/2; 1.5 is cell 3
        let xi = FrequencySet::new(g, [0]).unwrap();
        assert_eq!(omega_k(&xi, 0).unwrap(), vec![DyadicInterval::new(0, 0)]);
        let xi = FrequencySet::new(g, [0, 3]).unwrap();
        assert_eq!(
            omega_k(&xi, 0).unwrap(),
            vec![DyadicInterval::new(0, 0), DyadicInterval::new(0, 1)]
        );
        assert_eq!(omega_k(&xi, -1).unwrap(), vec![DyadicInterval::new(1, 0)]);
        assert!(omega_k(&xi, 2).is_err());
        assert!(omega_k(&xi, -3).is_err());
    }

    #[test]
    fn delta_examples() {
        let g = Grid::new(2, 2);
        let f = ramp(g);
        let xi = FrequencySet::new(g, [1, 6, 7, 12]).unwrap();
        let zero = WeightFamily::constant(&xi, -2..=2, 0.0).unwrap();
        assert_eq!(delta_k(&f, &zero, &xi, 0).unwrap().sup_norm(), 0.0);
        let one = WeightFamily::constant(&xi, -2..=2, 1.0).unwrap();
        let full = delta_k(&f, &one, &xi, -2).unwrap();
        assert!(full.max_abs_diff(&f).unwrap() < 1e-12);
        let empty = WeightFamily::new(-2..=2);
        assert!(matches!(
            delta_k(&f, &empty, &xi, 1),
            Err(Error::MissingWeight(_, 1))
        ));
    }

    #[test]
    fn delta_plancherel() {
        let g = Grid::new(2, 3);
        let f = ramp(g);
        let xi = FrequencySet::random(g, 5, 11).unwrap();
        let w = WeightFamily::gaussian(&xi, xi.k_bounds(), 4).unwrap();
        let spectrum = walsh_fourier(&f);
        for k in xi.k_bounds() {
            let d = delta_k(&f, &w, &xi, k).unwrap();
            let mut direct = 0.0;
            for om in omega_k(&xi, k).unwrap() {
                let e = w.get(k, &om).unwrap();
                let band = g.dual().cell_range(&om).unwrap();
                let energy: f64 = spectrum.values()[band].iter().map(|v| v * v).sum::<f64>()
                    * g.dual().cell_width();
                direct += e * e * energy;
            }
            assert!((d.l2_norm().powi(2) - direct).abs() < 1e-9 * (1.0 + direct));
        }
    }

    #[test]
    fn weight_variation_examples() {
        let g = Grid::new(2, 2);
        let xi = FrequencySet::new(g, [5]).unwrap();
        let c = WeightFamily::constant(&xi, -1..=1, -0.75).unwrap();
        assert!((weight_variation(&c, &xi, 2.5).unwrap() - 0.75).abs() < 1e-15);
        // decreasing k: 1 at k = 1, 0 at k = 0
        let w = WeightFamily::from_fn(&xi, 0..=1, |k, _| if k == 1 { 1.0 } else { 0.0 }).unwrap();
        assert!((weight_variation(&w, &xi, 3.0).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn weights_are_supported_on_xi() {
        let g = Grid::new(2, 2);
        let xi = FrequencySet::random(g, 3, 2).unwrap();
        let w = WeightFamily::gaussian(&xi, xi.k_bounds(), 2).unwrap();
        assert!(w.is_supported_on(&xi));
        let mut bad = WeightFamily::new(0..=0);
        assert!(bad.insert(0, DyadicInterval::new(1, 0), 1.0).is_err());
    }

    #[test]
    fn modulation_identity() {
        let g = Grid::new(2, 2);
        let f = ramp(g);
        let spectrum = walsh_fourier(&f);
        let dual = g.dual();
        for k in 0..=2 {
            for idx in 0..(1u64 << (g.k as i32 + k)) {
                let om = DyadicInterval::new(-k, idx);
                let band = dual.cell_range(&om).unwrap();
                let m = band_multiplier(&g, &[(om, 1.0)]).unwrap();
                let proj = walsh_fourier(&spectrum.modulate(&m).unwrap());
                let xi_cell = band.start;
                // y ∈ [0, 1) is a cell below 2^k
                for y in 0..(1usize << g.k) {
                    let e = g.character(y, xi_cell);
                    for x in 0..g.cells() {
                        let lhs = proj.values()[x ^ y];
                        assert!((lhs - e * proj.values()[x]).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn bourgain_trivial_cases() {
        let g = Grid::new(2, 2);
        let xi = FrequencySet::new(g, [3]).unwrap();
        let one = WeightFamily::constant(&xi, xi.k_bounds(), 1.0).unwrap();
        let rows = bourgain_experiment(&xi, &one, 2.2, 5, 9).unwrap();
        assert_eq!(rows.len(), 5);
        assert!(rows.iter().all(|r| r.ratio.is_finite() && r.ratio > 0.0));
        let zero = WeightFamily::constant(&xi, xi.k_bounds(), 0.0).unwrap();
        let rows = bourgain_experiment(&xi, &zero, 2.2, 3, 9).unwrap();
        assert!(rows.iter().all(|r| r.ratio == 0.0));
        assert!(bourgain_experiment(&xi, &one, 2.0, 1, 0).is_err());
    }

    #[test]
    fn disjoint_bands_run() {
        let g = Grid::new(2, 3);
        let d = DisjointBands::random(g, 4, 5, 3).unwrap();
        let b = d.bands();
        for i in 0..b.len() {
            for j in i + 1..b.len() {
                assert!(b[i].is_disjoint(&b[j]));
            }
        }
        let rows = d.experiment(2.5, 4, 1).unwrap();
        assert!(rows.iter().all(|r| r.ratio.is_finite()));
    }

    #[test]
    fn rademacher_menshov_identity() {
        let g = Grid::new(3, 2);
        let f = ramp(g);
        for seed in 0..5 {
            let xi = FrequencySet::random(g, 4, seed).unwrap();
            let w = WeightFamily::gaussian(&xi, xi.k_bounds(), seed).unwrap();
            let rm = rademacher_menshov(&f, &w, &xi).unwrap();
            assert!(rm.max_inner < 1e-9);
            assert!(rm.identity_error < 1e-9);
            let (d, a, b) = rm.norms;
            assert!(d <= a + b + 1e-9);
        }
    }
}
