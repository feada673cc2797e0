//! Jump counts and variational norms of finite `H`-valued sequences, and the
//! martingale square functions built from them.
//!
//! A [`KSequence`] is traversed in decreasing `k`. When it carries the
//! infinity entry, that entry comes first and equals zero, matching
//! `E(f | D_∞) = 0`.

use std::collections::HashSet;

use rayon::prelude::*;

use crate::dyadic::{DyadicInterval, StepFunction};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct KSequence {
    keys: Vec<i32>,
    dim: usize,
    values: Vec<f64>,
    infinity: bool,
}

/// Where a chain may begin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ChainStart {
    /// Any index.
    #[default]
    Free,
    /// `k₀ = ∞`; a zero entry is assumed if the sequence has none.
    Infinity,
}

/// Traversal order of the greedy `λ/2` selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GreedyDirection {
    /// From `∞` (or the largest `k`) towards smaller `k`.
    #[default]
    Downward,
    /// From the smallest `k` upwards.
    Upward,
}

impl KSequence {
    /// `values` holds one `dim`-vector per key, keys strictly decreasing.
    pub fn new(keys: Vec<i32>, dim: usize, values: Vec<f64>) -> Result<Self> {
        if dim == 0 || values.len() != keys.len() * dim {
            return Err(Error::DimensionMismatch(keys.len() * dim.max(1), values.len()));
        }
        if keys.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::PreconditionViolated(
                "sequence keys must be strictly decreasing".into(),
            ));
        }
        Ok(Self {
            keys,
            dim,
            values,
            infinity: false,
        })
    }

    pub fn scalar(keys: Vec<i32>, values: Vec<f64>) -> Result<Self> {
        Self::new(keys, 1, values)
    }

    /// Scalar values at keys `n-1, n-2, ..., 0`.
    pub fn from_scalars(values: &[f64]) -> Self {
        let n = values.len() as i32;
        Self::scalar((0..n).rev().collect(), values.to_vec()).expect("well formed")
    }

    /// Adds the leading `k = ∞` entry with value zero.
    pub fn with_infinity(mut self) -> Self {
        self.infinity = true;
        self
    }

    pub fn has_infinity(&self) -> bool {
        self.infinity
    }

    pub fn keys(&self) -> &[i32] {
        &self.keys
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of entries, counting the infinity entry.
    pub fn len(&self) -> usize {
        self.keys.len() + usize::from(self.infinity)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Entries in traversal order; `None` stands for the zero at infinity.
    fn points(&self, force_infinity: bool) -> Vec<Option<&[f64]>> {
        let mut out = Vec::with_capacity(self.len() + 1);
        if self.infinity || force_infinity {
            out.push(None);
        }
        out.extend(self.values.chunks_exact(self.dim).map(Some));
        out
    }

    /// `sup_k |g_k|_H`.
    pub fn sup_norm(&self) -> f64 {
        self.values
            .chunks_exact(self.dim)
            .map(norm)
            .fold(0.0, f64::max)
    }

    fn distances(&self, force_infinity: bool) -> Vec<Vec<f64>> {
        let pts = self.points(force_infinity);
        pts.iter()
            .map(|a| pts.iter().map(|b| dist(*a, *b)).collect())
            .collect()
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn dist(a: Option<&[f64]>, b: Option<&[f64]>) -> f64 {
    match (a, b) {
        (None, None) => 0.0,
        (Some(v), None) | (None, Some(v)) => norm(v),
        (Some(u), Some(v)) => u
            .iter()
            .zip(v)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt(),
    }
}

fn longest_chain(d: &[Vec<f64>], lambda: f64, start: ChainStart) -> usize {
    let n = d.len();
    // best[j]: most jumps in a chain ending at j; None if unreachable
    let mut best: Vec<Option<usize>> = vec![None; n];
    let mut result = 0;
    for j in 0..n {
        let mut b = match start {
            ChainStart::Free => Some(0),
            ChainStart::Infinity => (j == 0).then_some(0),
        };
        for i in 0..j {
            if let Some(bi) = best[i] {
                if d[i][j] >= lambda {
                    b = Some(b.map_or(bi + 1, |v: usize| v.max(bi + 1)));
                }
            }
        }
        best[j] = b;
        result = result.max(b.unwrap_or(0));
    }
    result
}

/// `M_λ`: the longest chain in decreasing `k` whose consecutive entries are at
/// least `λ` apart. Computed exactly by dynamic programming.
pub fn jump_count_max(s: &KSequence, lambda: f64) -> usize {
    jump_count_max_with(s, lambda, ChainStart::Free)
}

pub fn jump_count_max_with(s: &KSequence, lambda: f64, start: ChainStart) -> usize {
    assert!(lambda > 0.0, "jump size must be positive");
    let force = start == ChainStart::Infinity;
    longest_chain(&s.distances(force), lambda, start)
}

/// `M̃_λ`: starting from the first entry, repeatedly select the next entry
/// that is at least `λ/2` away from the last selection.
pub fn jump_count_greedy(s: &KSequence, lambda: f64) -> usize {
    jump_count_greedy_with(s, lambda, GreedyDirection::Downward)
}

pub fn jump_count_greedy_with(s: &KSequence, lambda: f64, dir: GreedyDirection) -> usize {
    assert!(lambda > 0.0, "jump size must be positive");
    let mut pts = s.points(false);
    if dir == GreedyDirection::Upward {
        pts.reverse();
    }
    let Some((&first, rest)) = pts.split_first() else {
        return 0;
    };
    let mut last = first;
    let mut count = 0;
    for &p in rest {
        if dist(p, last) >= lambda / 2.0 {
            count += 1;
            last = p;
        }
    }
    count
}

/// The chain part of the `V^r` norm: `sup (Σ |g_{k_m} - g_{k_{m-1}}|^r)^{1/r}`.
pub fn chain_variation(s: &KSequence, r: f64, start: ChainStart) -> f64 {
    let force = start == ChainStart::Infinity;
    let d = s.distances(force);
    let n = d.len();
    let mut best: Vec<f64> = vec![f64::NEG_INFINITY; n];
    let mut result: f64 = 0.0;
    for j in 0..n {
        let mut b = match start {
            ChainStart::Free => 0.0,
            ChainStart::Infinity if j == 0 => 0.0,
            ChainStart::Infinity => f64::NEG_INFINITY,
        };
        for i in 0..j {
            b = b.max(best[i] + d[i][j].powf(r));
        }
        best[j] = b;
        result = result.max(b);
    }
    result.powf(1.0 / r)
}

/// `‖g_k‖_{V^r(k)} = sup_k |g_k| + sup over chains of the ℓ^r sum of jumps`.
pub fn variation_norm(s: &KSequence, r: f64) -> f64 {
    variation_norm_with(s, r, ChainStart::Free)
}

pub fn variation_norm_with(s: &KSequence, r: f64, start: ChainStart) -> f64 {
    assert!(r >= 1.0, "variation exponent must be at least 1");
    s.sup_norm() + chain_variation(s, r, start)
}

/// `‖g_k‖_{V^{r,∞}(k)} = sup_k |g_k| + sup_λ λ M_λ^{1/r}`. The supremum over
/// `λ` is attained at one of the pairwise distances.
pub fn weak_variation_norm(s: &KSequence, r: f64) -> f64 {
    let d = s.distances(false);
    let mut candidates: Vec<f64> = d.iter().flatten().copied().filter(|&v| v > 0.0).collect();
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    let weak = candidates
        .into_iter()
        .map(|lambda| lambda * (longest_chain(&d, lambda, ChainStart::Free) as f64).powf(1.0 / r))
        .fold(0.0, f64::max);
    s.sup_norm() + weak
}

/// All conditional expectations `E(f | D_k)` at every cell, for `k` from `j`
/// down to `-k`.
#[derive(Debug, Clone)]
pub struct MartingaleTable {
    f: StepFunction,
    // levels[s][m * dim + a]: mean over the m-th interval of 2^s cells
    levels: Vec<Vec<f64>>,
}

impl MartingaleTable {
    pub fn new(f: &StepFunction) -> Self {
        let dim = f.dim();
        let mut levels = vec![f.values().to_vec()];
        while levels.last().unwrap().len() > dim {
            let prev = levels.last().unwrap();
            let mut next = Vec::with_capacity(prev.len() / 2);
            for pair in prev.chunks_exact(2 * dim) {
                for a in 0..dim {
                    next.push(0.5 * (pair[a] + pair[dim + a]));
                }
            }
            levels.push(next);
        }
        Self {
            f: f.clone(),
            levels,
        }
    }

    /// The sequence `k ↦ E(f | D_k)(x)` at cell `c`, including `k = ∞`.
    pub fn sequence(&self, c: usize) -> KSequence {
        let grid = self.f.grid();
        let dim = self.f.dim();
        let top = self.levels.len() - 1;
        let mut values = Vec::with_capacity(self.levels.len() * dim);
        for s in (0..=top).rev() {
            let m = c >> s;
            values.extend_from_slice(&self.levels[s][m * dim..(m + 1) * dim]);
        }
        let keys = (grid.min_scale()..=grid.max_scale()).rev().collect();
        KSequence::new(keys, dim, values)
            .expect("one vector per level")
            .with_infinity()
    }
}

/// `x ↦ M_λ(x)` for the martingale `E(f | D_k)(x)`, chains starting at `∞`.
pub fn martingale_jump_field(f: &StepFunction, lambda: f64) -> StepFunction {
    let table = MartingaleTable::new(f);
    let vals: Vec<f64> = (0..f.grid().cells())
        .into_par_iter()
        .map(|c| jump_count_max_with(&table.sequence(c), lambda, ChainStart::Infinity) as f64)
        .collect();
    StepFunction::scalar(f.grid(), vals).expect("one value per cell")
}

/// `x ↦ ‖E(f | D_k)(x)‖_{V^r(k)}`, the sequence including `k = ∞`.
pub fn martingale_variation_field(f: &StepFunction, r: f64) -> StepFunction {
    let table = MartingaleTable::new(f);
    let vals: Vec<f64> = (0..f.grid().cells())
        .into_par_iter()
        .map(|c| variation_norm(&table.sequence(c), r))
        .collect();
    StepFunction::scalar(f.grid(), vals).expect("one value per cell")
}

/// `(Σ_J |Σ_{I ∈ I_J} ε_I ⟨f, h_I⟩ h_I(x)|_H²)^{1/2}`.
///
/// `groups` must partition the Haar intervals of the grid (scales `1-k` to
/// `j`); `signs` returns `ε_I`.
pub fn signed_haar_square_function(
    f: &StepFunction,
    signs: &dyn Fn(&DyadicInterval) -> i8,
    groups: &[Vec<DyadicInterval>],
) -> Result<StepFunction> {
    let grid = f.grid();
    let dim = f.dim();
    let mut seen = HashSet::new();
    for iv in groups.iter().flatten() {
        if iv.scale <= grid.min_scale() || !grid.contains_interval(iv) || !seen.insert(*iv) {
            return Err(Error::PreconditionViolated(format!(
                "{iv:?} is repeated or is not a Haar interval of the grid"
            )));
        }
    }
    let expected = grid.intervals().filter(|iv| iv.scale > grid.min_scale()).count();
    if seen.len() != expected {
        return Err(Error::PreconditionViolated(format!(
            "groups cover {} of {expected} Haar intervals",
            seen.len()
        )));
    }
    let w = grid.cell_width();
    let mut sq = vec![0.0; grid.cells()];
    let mut block = vec![0.0; grid.cells() * dim];
    for group in groups {
        block.iter_mut().for_each(|v| *v = 0.0);
        for iv in group {
            let range = grid.cell_range(iv).expect("checked");
            let amp = iv.length().powf(-0.5);
            let mid = range.start + range.len() / 2;
            let eps = f64::from(signs(iv).signum());
            let mut coef = vec![0.0; dim];
            for c in range.clone() {
                let h = if c < mid { amp } else { -amp };
                for a in 0..dim {
                    coef[a] += w * h * f.values()[c * dim + a];
                }
            }
            for c in range {
                let h = if c < mid { amp } else { -amp };
                for a in 0..dim {
                    block[c * dim + a] += eps * coef[a] * h;
                }
            }
        }
        for (s, v) in sq.iter_mut().zip(block.chunks_exact(dim)) {
            *s += v.iter().map(|x| x * x).sum::<f64>();
        }
    }
    StepFunction::scalar(grid, sq.into_iter().map(f64::sqrt).collect())
}

/// `g^#(x) = sup_{x ∈ I} (|I|^{-1} ∫_I g² - (|I|^{-1} ∫_I g)²)^{1/2}`.
pub fn sharp_maximal(g: &StepFunction) -> Result<StepFunction> {
    let vals = g.require_scalar()?;
    let first = crate::dyadic::dyadic_means(vals);
    let squares: Vec<f64> = vals.iter().map(|v| v * v).collect();
    let second = crate::dyadic::dyadic_means(&squares);
    let out = (0..vals.len())
        .map(|c| {
            first
                .iter()
                .zip(&second)
                .enumerate()
                .map(|(lvl, (m1, m2))| (m2[c >> lvl] - m1[c >> lvl].powi(2)).max(0.0))
                .fold(0.0, f64::max)
                .sqrt()
        })
        .collect();
    StepFunction::scalar(g.grid(), out)
}

/// Both sides of the coordinatewise product bound
/// `‖a_k ⋆ b_k‖_{V^r} ≤ C (Σ_ξ ‖(a_k)_ξ‖_{V^r}² ‖(b_k)_ξ‖_{V^r}²)^{1/2}`.
///
/// Returns `(lhs, rhs)` without a constant; `lhs ≤ √2 · rhs` for `r ≥ 2`.
pub fn product_variation_sides(a: &KSequence, b: &KSequence, r: f64) -> Result<(f64, f64)> {
    if a.keys != b.keys || a.dim != b.dim || a.infinity != b.infinity {
        return Err(Error::DimensionMismatch(a.dim, b.dim));
    }
    let d = a.dim;
    let prod: Vec<f64> = a.values.iter().zip(&b.values).map(|(x, y)| x * y).collect();
    let mut ab = KSequence::new(a.keys.clone(), d, prod)?;
    ab.infinity = a.infinity;
    let lhs = variation_norm(&ab, r);
    let coord = |s: &KSequence, xi: usize| {
        let vals = s.values.iter().skip(xi).step_by(d).copied().collect();
        let mut c = KSequence::new(s.keys.clone(), 1, vals).expect("scalar slice");
        c.infinity = s.infinity;
        variation_norm(&c, r)
    };
    let rhs = (0..d)
        .map(|xi| (coord(a, xi) * coord(b, xi)).powi(2))
        .sum::<f64>()
        .sqrt();
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::Grid;

    #[test]
    fn jump_count_examples() {
        let c = KSequence::from_scalars(&[2.0, 2.0, 2.0]);
        assert_eq!(jump_count_max(&c, 0.1), 0);
        assert_eq!(jump_count_greedy(&c, 0.1), 0);

        let ones = KSequence::from_scalars(&[1.0; 4]).with_infinity();
        assert_eq!(jump_count_max(&ones, 0.6), 1);
        assert_eq!(jump_count_greedy(&ones, 0.6), 1);

        let zz = KSequence::scalar(vec![2, 1, 0], vec![0.0, 1.0, 0.0])
            .unwrap()
            .with_infinity();
        assert_eq!(jump_count_max(&zz, 0.5), 2);
    }

    #[test]
    fn chain_start_flag() {
        // without forcing ∞ the chain 1 -> 5 has one jump of 4
        let s = KSequence::from_scalars(&[1.0, 5.0]);
        assert_eq!(jump_count_max_with(&s, 3.0, ChainStart::Free), 1);
        // from ∞: 0 -> 5 only
        assert_eq!(jump_count_max_with(&s, 3.0, ChainStart::Infinity), 1);
        assert_eq!(jump_count_max_with(&s, 4.5, ChainStart::Infinity), 1);
        assert_eq!(jump_count_max_with(&s, 4.5, ChainStart::Free), 0);
        let v_free = variation_norm(&s, 2.0);
        let v_inf = variation_norm_with(&s, 2.0, ChainStart::Infinity);
        assert!((v_free - 9.0).abs() < 1e-12);
        assert!((v_inf - 10.0).abs() < 1e-12);
    }

    #[test]
    fn variation_examples() {
        let c = KSequence::from_scalars(&[-3.0, -3.0]);
        assert_eq!(variation_norm(&c, 2.0), 3.0);
        assert_eq!(weak_variation_norm(&c, 2.0), 3.0);
        let zz = KSequence::from_scalars(&[0.0, 1.0, 0.0]);
        let want = 1.0 + 2f64.sqrt();
        assert!((variation_norm(&zz, 2.0) - want).abs() < 1e-12);
        assert!((weak_variation_norm(&zz, 2.0) - want).abs() < 1e-12);
    }

    #[test]
    fn greedy_directions_dominate() {
        let s = KSequence::from_scalars(&[0.0, 0.3, 0.6, 0.9, 0.2, 1.0]).with_infinity();
        for lambda in [0.1, 0.25, 0.5, 0.7, 1.0] {
            let m = jump_count_max(&s, lambda);
            assert!(m <= jump_count_greedy_with(&s, lambda, GreedyDirection::Downward));
            assert!(m <= jump_count_greedy_with(&s, lambda, GreedyDirection::Upward));
        }
    }

    #[test]
    fn jump_field_examples() {
        let g = Grid::new(1, 2);
        let zero = StepFunction::zeros(g, 2);
        assert!(martingale_jump_field(&zero, 0.1).values().iter().all(|&v| v == 0.0));
        let f = StepFunction::indicator(g, &DyadicInterval::new(0, 0)).unwrap();
        let m = martingale_jump_field(&f, 0.6);
        assert_eq!(&m.values()[..4], &[1.0; 4]);
        assert!(martingale_jump_field(&f, 2.1).values().iter().all(|&v| v == 0.0));
        let seq = MartingaleTable::new(&f).sequence(0);
        assert_eq!(seq.keys(), &[1, 0, -1, -2]);
    }

    fn single_group(grid: Grid) -> Vec<Vec<DyadicInterval>> {
        vec![grid.intervals().filter(|iv| iv.scale > grid.min_scale()).collect()]
    }

    #[test]
    fn haar_square_function_examples() {
        let g = Grid::new(2, 1);
        let iv = DyadicInterval::new(1, 1);
        let h = crate::tiles::haar_function(&iv, &g).unwrap();
        let each: Vec<Vec<DyadicInterval>> = g
            .intervals()
            .filter(|iv| iv.scale > g.min_scale())
            .map(|iv| vec![iv])
            .collect();
        let sf = signed_haar_square_function(&h, &|_| -1, &each).unwrap();
        for (a, b) in sf.values().iter().zip(h.values()) {
            assert!((a - b.abs()).abs() < 1e-12);
        }

        let vals: Vec<f64> = (0..8).map(|c| (c as f64 * 1.3).cos()).collect();
        let f = StepFunction::scalar(g, vals).unwrap();
        let sf = signed_haar_square_function(&f, &|_| 1, &single_group(g)).unwrap();
        let resid = f.sub(&crate::dyadic::conditional_expectation(&f, 2)).unwrap();
        for (a, b) in sf.values().iter().zip(resid.values()) {
            assert!((a - b.abs()).abs() < 1e-12);
        }
        assert!(signed_haar_square_function(&f, &|_| 1, &[]).is_err());
    }

    #[test]
    fn sharp_maximal_examples() {
        let g = Grid::new(0, 1);
        let h = StepFunction::scalar(g, vec![1.0, -1.0]).unwrap();
        let s = sharp_maximal(&h).unwrap();
        assert_eq!(s.values(), &[1.0, 1.0]);
        let c = StepFunction::constant(Grid::new(2, 2), 4.0);
        assert!(sharp_maximal(&c).unwrap().values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn product_sides_simple() {
        let a = KSequence::new(vec![1, 0], 2, vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        let (lhs, rhs) = product_variation_sides(&a, &a, 2.0).unwrap();
        assert!(lhs <= 2f64.sqrt() * rhs + 1e-12);
    }
}
