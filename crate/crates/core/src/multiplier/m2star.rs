//! Estimates of the `M₂*` norm
//! `sup_{‖g‖₂ = 1} ‖sup_k |(ĝ m_k)ˇ|‖₂` of a finite multiplier family.
//!
//! In the coordinates `u = g · 2^{-k/2}` of a unit vector, the transform is the
//! symmetric orthogonal matrix `H` with `H² = I`, each member acts as
//! `T_k = H diag(m_k) H`, and the objective is
//! `F(u)² = Σ_c max_k |(T_k u)_c|²`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::dyadic::{character_sum, walsh_fourier, Grid, StepFunction};
use crate::error::{Error, Result};
use crate::rng::stream_rng;

/// `k ↦ m_k`, real multipliers on the frequency cells of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierFamily {
    grid: Grid,
    members: Vec<Vec<f64>>,
}

impl MultiplierFamily {
    /// `grid` is the time grid; each member has one value per frequency cell.
    pub fn new(grid: Grid, members: Vec<Vec<f64>>) -> Result<Self> {
        if let Some(m) = members.iter().find(|m| m.len() != grid.cells()) {
            return Err(Error::MismatchedGrid {
                expected: grid.cells(),
                found: m.len(),
            });
        }
        Ok(Self { grid, members })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn members(&self) -> &[Vec<f64>] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// `x ↦ sup_k |(ĝ m_k)ˇ(x)|`.
    pub fn maximal_apply(&self, g: &StepFunction) -> Result<StepFunction> {
        g.require_scalar()?;
        if g.grid() != self.grid {
            return Err(Error::MismatchedGrid {
                expected: self.grid.cells(),
                found: g.grid().cells(),
            });
        }
        let spectrum = walsh_fourier(g);
        let mut out = vec![0.0f64; self.grid.cells()];
        for m in &self.members {
            let back = walsh_fourier(&spectrum.modulate(m)?);
            for (o, v) in out.iter_mut().zip(back.values()) {
                *o = o.max(v.abs());
            }
        }
        StepFunction::scalar(self.grid, out)
    }

    /// `‖sup_k |(ĝ m_k)ˇ|‖₂`.
    pub fn maximal_norm(&self, g: &StepFunction) -> Result<f64> {
        Ok(self.maximal_apply(g)?.l2_norm())
    }
}

/// `(Σ_k ‖m_k‖_∞²)^{1/2}`, since `sup_k |·| ≤ (Σ_k |·|²)^{1/2}`.
pub fn m2star_upper(family: &MultiplierFamily) -> f64 {
    family
        .members
        .iter()
        .map(|m| m.iter().fold(0.0f64, |a, v| a.max(v.abs())).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// A lower bound with the function attaining it.
#[derive(Debug, Clone)]
pub struct M2StarEstimate {
    pub value: f64,
    /// Unit-norm `g` with `‖sup_k |(ĝ m_k)ˇ|‖₂ = value`.
    pub witness: StepFunction,
}

/// Normalized transform `u ↦ H u` in place.
fn hadamard(grid: &Grid, u: &mut [f64], scratch: &mut Vec<f64>) {
    character_sum(grid, u, (grid.cells() as f64).sqrt().recip(), scratch);
}

struct Ascent<'a> {
    grid: Grid,
    members: &'a [Vec<f64>],
    scratch: Vec<f64>,
}

impl Ascent<'_> {
    /// `(T_k u)` for every member.
    fn images(&mut self, u: &[f64]) -> Vec<Vec<f64>> {
        let mut v = u.to_vec();
        hadamard(&self.grid, &mut v, &mut self.scratch);
        self.members
            .iter()
            .map(|m| {
                let mut y: Vec<f64> = v.iter().zip(m).map(|(a, b)| a * b).collect();
                hadamard(&self.grid, &mut y, &mut self.scratch);
                y
            })
            .collect()
    }

    /// `F(u)²` and the per-cell argmax, ties to the smaller index.
    fn objective(images: &[Vec<f64>]) -> (f64, Vec<usize>) {
        let n = images[0].len();
        let mut total = 0.0;
        let mut arg = vec![0usize; n];
        for c in 0..n {
            let mut best = images[0][c].abs();
            for (k, y) in images.iter().enumerate().skip(1) {
                if y[c].abs() > best {
                    best = y[c].abs();
                    arg[c] = k;
                }
            }
            total += best * best;
        }
        (total, arg)
    }

    /// One power step on the quadratic form frozen at `arg`.
    fn step(&mut self, images: &[Vec<f64>], arg: &[usize]) -> Vec<f64> {
        let n = arg.len();
        let mut acc = vec![0.0; n];
        for (k, y) in images.iter().enumerate() {
            let mut masked: Vec<f64> = (0..n).map(|c| if arg[c] == k { y[c] } else { 0.0 }).collect();
            if masked.iter().all(|&v| v == 0.0) {
                continue;
            }
            hadamard(&self.grid, &mut masked, &mut self.scratch);
            masked
                .iter_mut()
                .zip(&self.members[k])
                .for_each(|(a, b)| *a *= b);
            hadamard(&self.grid, &mut masked, &mut self.scratch);
            acc.iter_mut().zip(&masked).for_each(|(a, b)| *a += b);
        }
        acc
    }

    fn run(&mut self, mut u: Vec<f64>, max_iters: usize) -> (f64, Vec<f64>) {
        normalize(&mut u);
        let mut images = self.images(&u);
        let (mut value, mut arg) = Self::objective(&images);
        for _ in 0..max_iters {
            let mut next = self.step(&images, &arg);
            if normalize(&mut next) == 0.0 {
                break;
            }
            let next_images = self.images(&next);
            let (next_value, next_arg) = Self::objective(&next_images);
            if next_value <= value * (1.0 + 1e-13) {
                if next_value > value {
                    u = next;
                    value = next_value;
                }
                break;
            }
            u = next;
            images = next_images;
            value = next_value;
            arg = next_arg;
        }
        (value, u)
    }
}

fn normalize(u: &mut [f64]) -> f64 {
    let n = u.iter().map(|a| a * a).sum::<f64>().sqrt();
    if n > 0.0 {
        u.iter_mut().for_each(|a| *a /= n);
    }
    n
}

/// Projected power ascent from the best single-frequency start and from
/// `restarts` Gaussian starts. Restart `r` draws from the stream
/// `derive_seed(seed, r)`.
pub fn m2star_lower(family: &MultiplierFamily, restarts: usize, seed: u64) -> M2StarEstimate {
    m2star_lower_with(family, restarts, seed, 400)
}

pub fn m2star_lower_with(
    family: &MultiplierFamily,
    restarts: usize,
    seed: u64,
    max_iters: usize,
) -> M2StarEstimate {
    let grid = family.grid;
    let n = grid.cells();
    let members: Vec<Vec<f64>> = dedup_members(&family.members);
    if members.is_empty() {
        let mut e = vec![0.0; n];
        e[0] = 1.0;
        return finish(family, e);
    }
    // the spectral start: H e_t on the largest multiplier entry
    let (mut best_t, mut best_abs) = (0usize, -1.0f64);
    for m in &members {
        for (t, v) in m.iter().enumerate() {
            if v.abs() > best_abs {
                best_abs = v.abs();
                best_t = t;
            }
        }
    }
    let mut starts: Vec<Vec<f64>> = Vec::with_capacity(restarts + 1);
    let mut e = vec![0.0; n];
    e[best_t] = 1.0;
    let mut scratch = Vec::new();
    hadamard(&grid, &mut e, &mut scratch);
    starts.push(e);
    for r in 0..restarts {
        let mut rng = stream_rng(seed, r as u64);
        starts.push((0..n).map(|_| StandardNormal.sample(&mut rng)).collect());
    }
    let results: Vec<(f64, Vec<f64>)> = starts
        .into_par_iter()
        .map(|u| {
            let mut a = Ascent {
                grid,
                members: &members,
                scratch: Vec::new(),
            };
            a.run(u, max_iters)
        })
        .collect();
    let mut best = 0;
    for (i, r) in results.iter().enumerate() {
        if r.0 > results[best].0 {
            best = i;
        }
    }
    let u = results.into_iter().nth(best).expect("at least one start").1;
    finish(family, u)
}

fn finish(family: &MultiplierFamily, u: Vec<f64>) -> M2StarEstimate {
    let grid = family.grid;
    let scale = grid.cell_width().sqrt().recip();
    let witness =
        StepFunction::scalar(grid, u.into_iter().map(|a| a * scale).collect()).expect("grid sized");
    let value = family.maximal_norm(&witness).expect("same grid");
    M2StarEstimate { value, witness }
}

fn dedup_members(members: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for m in members {
        if m.iter().any(|&v| v != 0.0) && !out.contains(m) {
            out.push(m.clone());
        }
    }
    out
}

/// Largest number of argmax assignments the oracle enumerates.
pub const ORACLE_LIMIT: u128 = 65_536;

/// Row `c` of every `T_k`, with zero rows, repeats and sign flips dropped.
/// A zero row is kept only when it is the sole choice.
fn cell_rows(grid: &Grid, members: &[Vec<f64>], c: usize, scratch: &mut Vec<f64>) -> Vec<Vec<f64>> {
    let n = grid.cells();
    let mut e = vec![0.0; n];
    e[c] = 1.0;
    hadamard(grid, &mut e, scratch);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for m in members {
        // T_k is symmetric, so row c is T_k e_c
        let mut row: Vec<f64> = e.iter().zip(m).map(|(a, b)| a * b).collect();
        hadamard(grid, &mut row, scratch);
        let scale = row.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if scale < 1e-14 {
            continue;
        }
        let same = |r: &Vec<f64>, sign: f64| r.iter().zip(&row).all(|(a, b)| (a - sign * b).abs() <= 1e-12 * scale);
        if !rows.iter().any(|r| same(r, 1.0) || same(r, -1.0)) {
            rows.push(row);
        }
    }
    if rows.is_empty() {
        rows.push(vec![0.0; n]);
    }
    rows
}

/// Number of assignments [`m2star_oracle`] would enumerate, counted up to the
/// first partial product above `limit`.
pub fn oracle_assignments(family: &MultiplierFamily, limit: u128) -> u128 {
    let members = dedup_members(&family.members);
    let mut scratch = Vec::new();
    let mut total: u128 = 1;
    for c in 0..family.grid.cells() {
        if members.is_empty() {
            break;
        }
        total *= cell_rows(&family.grid, &members, c, &mut scratch).len() as u128;
        if total > limit {
            break;
        }
    }
    total
}

/// Exact `M₂*` norm: `F(u)² = max_κ λ_max(Σ_c r_{κ(c), c}ᵀ r_{κ(c), c})`,
/// maximized over assignments `κ` of a member to each cell, where `r_{k,c}` is
/// row `c` of `T_k`.
///
/// Adding a row can only raise the top eigenvalue, so zero rows are dropped
/// wherever another choice exists, and repeated rows are merged. At most
/// [`ORACLE_LIMIT`] assignments remain; otherwise the partial count that
/// crossed the limit is returned in the error.
pub fn m2star_oracle(family: &MultiplierFamily) -> Result<f64> {
    let grid = family.grid;
    let n = grid.cells();
    let members = dedup_members(&family.members);
    if members.is_empty() {
        return Ok(0.0);
    }
    let mut scratch = Vec::new();
    let mut choices: Vec<Vec<Vec<f64>>> = Vec::with_capacity(n);
    let mut total: u128 = 1;
    for c in 0..n {
        let rows = cell_rows(&grid, &members, c, &mut scratch);
        total *= rows.len() as u128;
        if total > ORACLE_LIMIT {
            return Err(Error::InstanceTooLarge(total));
        }
        choices.push(rows);
    }
    let outer = |r: &[f64]| {
        let v = DVector::from_column_slice(r);
        &v * v.transpose()
    };
    let free: Vec<usize> = (0..n).filter(|&c| choices[c].len() > 1).collect();
    let mut fixed = DMatrix::<f64>::zeros(n, n);
    for c in (0..n).filter(|&c| choices[c].len() == 1) {
        fixed += outer(&choices[c][0]);
    }
    let outers: Vec<Vec<DMatrix<f64>>> = free
        .iter()
        .map(|&c| choices[c].iter().map(|r| outer(r)).collect())
        .collect();
    let best = (0..total as usize)
        .into_par_iter()
        .map(|mut code| {
            let mut q = fixed.clone();
            for o in &outers {
                q += &o[code % o.len()];
                code /= o.len();
            }
            SymmetricEigen::new(q).eigenvalues.max()
        })
        .reduce(|| 0.0, f64::max);
    Ok(best.max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn family(grid: Grid, members: Vec<Vec<f64>>) -> MultiplierFamily {
        MultiplierFamily::new(grid, members).unwrap()
    }

    #[test]
    fn zero_family() {
        let g = Grid::new(1, 1);
        let z = family(g, vec![vec![0.0; 4]; 3]);
        assert_eq!(m2star_lower(&z, 2, 1).value, 0.0);
        assert_eq!(m2star_oracle(&z).unwrap(), 0.0);
        assert_eq!(m2star_upper(&z), 0.0);
    }

    #[test]
    fn single_member_is_sup_norm() {
        let g = Grid::new(1, 2);
        let m = vec![0.5, -2.0, 1.0, 0.0, 0.25, 1.5, -0.75, 0.0];
        let f = family(g, vec![m]);
        let lo = m2star_lower(&f, 4, 7);
        assert!((lo.value - 2.0).abs() < 1e-9);
        assert!((lo.witness.l2_norm() - 1.0).abs() < 1e-12);
        assert!((m2star_oracle(&f).unwrap() - 2.0).abs() < 1e-9);
        assert_eq!(m2star_upper(&f), 2.0);
    }

    #[test]
    fn constant_family_matches_single() {
        let g = Grid::new(1, 1);
        let m = vec![0.3, -0.9, 0.1, 0.6];
        let f = family(g, vec![m.clone(), m.clone(), m]);
        assert!((m2star_oracle(&f).unwrap() - 0.9).abs() < 1e-10);
    }

    #[test]
    fn sandwich_on_a_small_family() {
        let g = Grid::new(1, 2);
        let members: Vec<Vec<f64>> = (0..3)
            .map(|k| (0..8).map(|t| ((t * 3 + k * 5) % 7) as f64 / 7.0 - 0.4).collect())
            .collect();
        let f = family(g, members);
        let lo = m2star_lower(&f, 32, 3);
        let or = m2star_oracle(&f).unwrap();
        let up = m2star_upper(&f);
        assert!(lo.value <= or + 1e-9, "{} {}", lo.value, or);
        assert!(or <= up + 1e-9);
        assert!(lo.value >= 0.95 * or);
        let again = f.maximal_norm(&lo.witness).unwrap();
        assert!((again - lo.value).abs() < 1e-9);
    }

    #[test]
    fn oracle_refuses_large_instances() {
        let g = Grid::new(2, 2);
        let members: Vec<Vec<f64>> = (0..4)
            .map(|k| (0..16).map(|t| ((t * 7 + k * 3) % 5) as f64).collect())
            .collect();
        assert!(matches!(
            m2star_oracle(&family(g, members)),
            Err(Error::InstanceTooLarge(_))
        ));
    }
}
