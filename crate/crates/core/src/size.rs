//! Size of bitile collections, greedy tree selection, forest splitting and
//! exceptional sets.
//!
//! Tops `(I, ξ)` range over the grid's dyadic intervals and the left
//! endpoints of the frequency cells. For a frequency cell `t` and a time
//! interval `I` of scale `i`, the only bitile with time interval `I` whose
//! frequency interval contains `ξ_t` has index `t >> (j + 1 - i)`, and `ξ_t`
//! lies in its upper half exactly when bit `j - i` of `t` is set. The
//! maximal 2-tree sums are then accumulated bottom-up over `I`.

use rayon::prelude::*;

use crate::dyadic::{maximal_function, DyadicInterval, DyadicPoint, Grid, StepFunction};
use crate::error::{Error, Result};
use crate::tiles::{
    counting_on_grid, wave_packet_at, Bitile, BitileIndex, Forest, Rect, TileCoefficients, Tree,
    TreeKind,
};
use crate::variation::{variation_norm, KSequence};

/// `(|I_T|^{-1} Σ_{P ∈ T} |⟨f, w_{P₁}⟩|²)^{1/2}` for a 2-tree.
pub fn tree_size(tree: &Tree, f: &StepFunction) -> Result<f64> {
    tree_size_with(tree, &TileCoefficients::new(f)?)
}

pub fn tree_size_with(tree: &Tree, coeffs: &TileCoefficients) -> Result<f64> {
    if !tree.is_two_tree() {
        return Err(Error::NotATwoTree);
    }
    let mut sum = 0.0;
    for p in tree.bitiles() {
        let a = coeffs.lower(p).ok_or(Error::OutsideGrid {
            time: p.time(),
            freq: p.freq(),
        })?;
        sum += a * a;
    }
    Ok((sum / tree.top_time().length()).sqrt())
}

/// A candidate top with its maximal 2-tree and maximal tree statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
struct TopStat {
    t: usize,
    top: DyadicInterval,
    /// `Σ a_P²` over the maximal 2-tree.
    sum_sq: f64,
    /// Members of the maximal tree.
    count: usize,
}

/// Bitile membership and squared coefficients in dense-index form.
struct Pool {
    index: BitileIndex,
    a2: Vec<f64>,
    present: Vec<bool>,
}

impl Pool {
    fn new(grid: Grid, bitiles: &[Bitile], coeffs: &TileCoefficients) -> Result<Self> {
        let index = BitileIndex::new(grid);
        let mut a2 = vec![0.0; index.len()];
        let mut present = vec![false; index.len()];
        for p in bitiles {
            let id = index.id(p).ok_or(Error::OutsideGrid {
                time: p.time(),
                freq: p.freq(),
            })?;
            let a = coeffs.lower(p).expect("bitile fits");
            a2[id] = a * a;
            present[id] = true;
        }
        Ok(Self { index, a2, present })
    }

    fn remove(&mut self, id: usize) {
        self.present[id] = false;
        self.a2[id] = 0.0;
    }

    /// Calls `visit` for every top `(t, I)` with `I` of bitile scale.
    fn scan(&self, mut visit: impl FnMut(TopStat)) {
        let grid = self.index.grid();
        let j = grid.j as i32;
        let min = self.index.min_scale();
        let per = self.index.per_scale();
        let mut sums: Vec<f64> = Vec::new();
        let mut counts: Vec<usize> = Vec::new();
        for t in 0..grid.cells() {
            let mut prev_sums: Vec<f64> = Vec::new();
            let mut prev_counts: Vec<usize> = Vec::new();
            for i in min..=j {
                let intervals = 1usize << (j - i);
                let fbits = (grid.k as i32 + i - 1) as u32;
                let l = t >> (j + 1 - i);
                let upper = (t >> (j - i)) & 1 == 1;
                let base = (i - min) as usize * per;
                sums.clear();
                counts.clear();
                for n in 0..intervals {
                    let id = base + ((n << fbits) | l);
                    let mut s = if upper { self.a2[id] } else { 0.0 };
                    let mut c = usize::from(self.present[id]);
                    if !prev_sums.is_empty() {
                        s += prev_sums[2 * n] + prev_sums[2 * n + 1];
                        c += prev_counts[2 * n] + prev_counts[2 * n + 1];
                    }
                    sums.push(s);
                    counts.push(c);
                    visit(TopStat {
                        t,
                        top: DyadicInterval::new(i, n as u64),
                        sum_sq: s,
                        count: c,
                    });
                }
                std::mem::swap(&mut prev_sums, &mut sums);
                std::mem::swap(&mut prev_counts, &mut counts);
            }
        }
    }

    fn size(&self) -> f64 {
        let mut best: f64 = 0.0;
        self.scan(|s| best = best.max(s.sum_sq / s.top.length()));
        best.sqrt()
    }
}

/// `size(S) = sup` of [`tree_size`] over maximal 2-trees `{P ∈ S : I_P ⊆ I,
/// ξ ∈ ω_{P,2}}` with grid tops `(I, ξ)`.
pub fn collection_size(bitiles: &[Bitile], f: &StepFunction) -> Result<f64> {
    collection_size_with(bitiles, &TileCoefficients::new(f)?)
}

pub fn collection_size_with(bitiles: &[Bitile], coeffs: &TileCoefficients) -> Result<f64> {
    if bitiles.is_empty() {
        return Ok(0.0);
    }
    Ok(Pool::new(coeffs.grid(), bitiles, coeffs)?.size())
}

/// Bitiles removed at size level `n`, grouped into the selected trees.
#[derive(Debug, Clone)]
pub struct SizedForestLevel {
    pub n: i32,
    /// Set for the final level whose remaining bitiles have zero size; its
    /// trees carry no coefficient mass.
    pub zero_size: bool,
    pub bitiles: Vec<Bitile>,
    /// The selected trees `F_{P_n}`, pairwise disjoint.
    pub forest: Forest,
    /// `F^{(2)}`: the maximal 2-tree of each selected top within the level.
    pub two_tree_forest: Forest,
    /// `F^{(1)}`: the remaining members, as 1-trees.
    pub one_tree_forest: Forest,
}

impl SizedForestLevel {
    /// `Σ_T |I_T| / (2^{2n} ‖f‖₂²)`; zero for the zero-size level.
    pub fn bessel_ratio(&self, f_norm: f64) -> f64 {
        if self.zero_size || f_norm == 0.0 {
            return 0.0;
        }
        self.forest.top_measure() / (4f64.powi(self.n) * f_norm * f_norm)
    }
}

/// The largest `n` with `size ≤ 2^{-n}`, i.e. `floor(-log₂ size)`.
pub fn size_level(size: f64) -> i32 {
    assert!(size > 0.0);
    let mut n = (-size.log2()).floor() as i32;
    while size > 2f64.powi(-n) {
        n -= 1;
    }
    while size <= 2f64.powi(-n - 1) {
        n += 1;
    }
    n
}

fn better_top(a: &TopStat, b: &TopStat) -> bool {
    // minimal ξ, then smaller left endpoint, then larger interval
    if a.t != b.t {
        return a.t < b.t;
    }
    let (la, lb) = (a.top.left_f64(), b.top.left_f64());
    if la != lb {
        return la < lb;
    }
    a.top.scale > b.top.scale
}

/// Greedy tree selection. Starting at `n = floor(-log₂ size(S))`, repeatedly
/// removes the maximal tree of the first top (minimal `ξ_T`, then smaller left
/// endpoint, then longer `I_T`) whose maximal 2-tree has size `> 2^{-n-1}`.
/// When none is left the level closes and `n` jumps to the level of the
/// remainder.
pub fn select_forest(bitiles: &[Bitile], f: &StepFunction) -> Result<Vec<SizedForestLevel>> {
    select_forest_with(bitiles, &TileCoefficients::new(f)?)
}

pub fn select_forest_with(
    bitiles: &[Bitile],
    coeffs: &TileCoefficients,
) -> Result<Vec<SizedForestLevel>> {
    let grid = coeffs.grid();
    let mut pool = Pool::new(grid, bitiles, coeffs)?;
    let mut remaining: usize = pool.present.iter().filter(|&&p| p).count();
    let budget = remaining;
    let mut selections = 0usize;
    let mut levels = Vec::new();
    let mut n = match pool.size() {
        s if s > 0.0 => size_level(s),
        _ => 0,
    };
    while remaining > 0 {
        let size = pool.size();
        let zero_size = size == 0.0;
        if !zero_size {
            n = n.max(size_level(size));
        }
        let threshold = 4f64.powi(-n - 1);
        let mut trees = Vec::new();
        let mut members_all = Vec::new();
        loop {
            let mut best: Option<TopStat> = None;
            pool.scan(|s| {
                let ok = if zero_size {
                    s.count > 0
                } else {
                    s.sum_sq / s.top.length() > threshold
                };
                if ok && best.as_ref().is_none_or(|b| better_top(&s, b)) {
                    best = Some(s);
                }
            });
            let Some(top) = best else { break };
            selections += 1;
            if selections > budget {
                return Err(Error::NonTermination(budget));
            }
            let xi = grid.dual().cell_point(top.t);
            let mut members = Vec::new();
            for id in 0..pool.index.len() {
                if pool.present[id] {
                    let p = pool.index.bitile(id);
                    if TreeKind::General.admits(&top.top, &xi, &p) {
                        members.push(p);
                        pool.remove(id);
                    }
                }
            }
            remaining -= members.len();
            members_all.extend_from_slice(&members);
            trees.push(Tree::new(top.top, xi, members, TreeKind::General)?);
            if zero_size && remaining == 0 {
                break;
            }
        }
        if !trees.is_empty() {
            let forest = Forest::new(trees);
            let split = split_forest(&members_all, &forest)?;
            members_all.sort();
            levels.push(SizedForestLevel {
                n,
                zero_size,
                bitiles: members_all,
                forest,
                two_tree_forest: split.two_tree_forest,
                one_tree_forest: split.one_tree_forest,
            });
        }
        n += 1;
    }
    Ok(levels)
}

/// Result of [`split_forest`].
#[derive(Debug, Clone, Default)]
pub struct ForestSplit {
    pub one_tree_bitiles: Vec<Bitile>,
    pub one_tree_forest: Forest,
    pub two_tree_bitiles: Vec<Bitile>,
    pub two_tree_forest: Forest,
}

/// `T^{(2)} = {P ∈ S : I_P ⊆ I_T, ξ_T ∈ ω_{P,2}}` for every tree, then
/// `T^{(1)}` from what is left with `ξ_T ∈ ω_{P,1}`, each bitile going to the
/// first such tree. Empty trees are dropped.
pub fn split_forest(bitiles: &[Bitile], forest: &Forest) -> Result<ForestSplit> {
    let mut in_two = vec![false; bitiles.len()];
    let mut twos = Vec::new();
    for t in forest.iter() {
        let mut members = Vec::new();
        for (k, p) in bitiles.iter().enumerate() {
            if TreeKind::Two.admits(&t.top_time(), t.top_freq(), p) {
                members.push(*p);
                in_two[k] = true;
            }
        }
        if !members.is_empty() {
            twos.push(Tree::new(t.top_time(), t.top_freq().clone(), members, TreeKind::Two)?);
        }
    }
    let mut in_one = vec![false; bitiles.len()];
    let mut ones = Vec::new();
    for t in forest.iter() {
        let mut members = Vec::new();
        for (k, p) in bitiles.iter().enumerate() {
            if !in_two[k] && !in_one[k] && TreeKind::One.admits(&t.top_time(), t.top_freq(), p) {
                members.push(*p);
                in_one[k] = true;
            }
        }
        if !members.is_empty() {
            ones.push(Tree::new(t.top_time(), t.top_freq().clone(), members, TreeKind::One)?);
        }
    }
    let uncovered = (0..bitiles.len()).filter(|&k| !in_one[k] && !in_two[k]).count();
    if uncovered > 0 {
        return Err(Error::Coverage(uncovered));
    }
    let pick = |mask: &[bool]| -> Vec<Bitile> {
        bitiles
            .iter()
            .zip(mask)
            .filter(|(_, &m)| m)
            .map(|(p, _)| *p)
            .collect()
    };
    Ok(ForestSplit {
        one_tree_bitiles: pick(&in_one),
        one_tree_forest: Forest::new(ones),
        two_tree_bitiles: pick(&in_two),
        two_tree_forest: Forest::new(twos),
    })
}

/// A union of grid cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExceptionalSet {
    grid: Grid,
    mask: Vec<bool>,
}

impl ExceptionalSet {
    pub fn empty(grid: Grid) -> Self {
        Self {
            grid,
            mask: vec![false; grid.cells()],
        }
    }

    pub fn from_mask(grid: Grid, mask: Vec<bool>) -> Result<Self> {
        if mask.len() != grid.cells() {
            return Err(Error::MismatchedGrid {
                expected: grid.cells(),
                found: mask.len(),
            });
        }
        Ok(Self { grid, mask })
    }

    pub fn from_intervals(grid: Grid, intervals: &[DyadicInterval]) -> Result<Self> {
        let mut set = Self::empty(grid);
        for iv in intervals {
            let r = grid.cell_range(iv).ok_or(Error::OutsideGrid {
                time: *iv,
                freq: *iv,
            })?;
            set.mask[r].fill(true);
        }
        Ok(set)
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn contains(&self, c: usize) -> bool {
        self.mask[c]
    }

    pub fn cells(&self) -> impl Iterator<Item = usize> + '_ {
        self.mask.iter().enumerate().filter(|(_, &m)| m).map(|(c, _)| c)
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        self.count() == 0
    }

    pub fn measure(&self) -> f64 {
        self.count() as f64 * self.grid.cell_width()
    }

    pub fn union(&self, other: &Self) -> Self {
        Self {
            grid: self.grid,
            mask: self.mask.iter().zip(&other.mask).map(|(a, b)| *a || *b).collect(),
        }
    }

    pub fn indicator(&self) -> StepFunction {
        let vals = self.mask.iter().map(|&m| f64::from(u8::from(m))).collect();
        StepFunction::scalar(self.grid, vals).expect("one value per cell")
    }
}

/// `E^{(1)} = {x : Σ_T 1_{I_T}(x) > β}`.
pub fn exceptional_counting(forest: &Forest, beta: f64, grid: &Grid) -> ExceptionalSet {
    let mask = counting_on_grid(forest, grid)
        .into_iter()
        .map(|n| n as f64 > beta)
        .collect();
    ExceptionalSet { grid: *grid, mask }
}

/// Which scales enter the truncated tree sums at level `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Truncation {
    /// `|I_P| < 2^k`.
    #[default]
    Strict,
    /// `|I_P| ≤ 2^k`.
    Inclusive,
}

/// `k ↦ Σ_{P ∈ T, |I_P| < 2^k} a_P w_{P₁}(x)` at cell `c`, for `k` from
/// `j + 1` down to `1 - k` (one step past the bitile scales at each end).
pub fn tree_partial_sums(
    tree: &Tree,
    coeffs: &(dyn Fn(&Bitile) -> f64 + Sync),
    grid: &Grid,
    c: usize,
    truncation: Truncation,
) -> KSequence {
    let lo = 1 - grid.k as i32;
    let hi = grid.j as i32;
    let mut by_scale = vec![0.0; (hi - lo + 1) as usize];
    for p in tree.bitiles() {
        let v = wave_packet_at(&p.lower(), grid, c);
        if v != 0.0 {
            by_scale[(p.scale() - lo) as usize] += coeffs(p) * v;
        }
    }
    let shift = match truncation {
        Truncation::Strict => 0,
        Truncation::Inclusive => 1,
    };
    // strict: value at k sums scales i ≤ k - 1
    let keys: Vec<i32> = (lo..=hi + 1).rev().map(|k| k - shift).collect();
    let values = keys
        .iter()
        .map(|&k| {
            let top = k + shift - 1;
            by_scale
                .iter()
                .enumerate()
                .filter(|(s, _)| lo + *s as i32 <= top)
                .map(|(_, v)| v)
                .sum()
        })
        .collect();
    KSequence::scalar(keys, values).expect("one value per key")
}

/// `E^{(2)} = ∪_T {x : ‖Σ_{P ∈ T, |I_P| < 2^k} a_P w_{P₁}(x)‖_{V^r(k)} > γ}`.
pub fn exceptional_variation(
    two_trees: &Forest,
    coeffs: &(dyn Fn(&Bitile) -> f64 + Sync),
    gamma: f64,
    r: f64,
    grid: &Grid,
) -> ExceptionalSet {
    exceptional_variation_with(two_trees, coeffs, gamma, r, grid, Truncation::Strict)
}

pub fn exceptional_variation_with(
    two_trees: &Forest,
    coeffs: &(dyn Fn(&Bitile) -> f64 + Sync),
    gamma: f64,
    r: f64,
    grid: &Grid,
    truncation: Truncation,
) -> ExceptionalSet {
    let mask = tree_variation_maxima(two_trees, coeffs, r, grid, truncation)
        .into_iter()
        .map(|v| v > gamma)
        .collect();
    ExceptionalSet { grid: *grid, mask }
}

/// `max_T ‖Σ_{P ∈ T, |I_P| < 2^k} a_P w_{P₁}(x)‖_{V^r(k)}` at every cell.
pub fn tree_variation_maxima(
    trees: &Forest,
    coeffs: &(dyn Fn(&Bitile) -> f64 + Sync),
    r: f64,
    grid: &Grid,
    truncation: Truncation,
) -> Vec<f64> {
    (0..grid.cells())
        .into_par_iter()
        .map(|c| {
            trees
                .iter()
                .filter(|t| t.top_time().contains_point(&grid.cell_point(c)))
                .map(|t| variation_norm(&tree_partial_sums(t, coeffs, grid, c, truncation), r))
                .fold(0.0, f64::max)
        })
        .collect()
}

/// `E = {x : M_p 1_F(x) ≥ λ}`.
pub fn exceptional_maximal(set: &ExceptionalSet, p: f64, lambda: f64) -> ExceptionalSet {
    let m = maximal_function(&set.indicator(), p);
    let mask = m.values().iter().map(|&v| v >= lambda).collect();
    ExceptionalSet {
        grid: set.grid,
        mask,
    }
}

/// `inf_{x ∈ I} M_s f(x)`.
pub fn maximal_inf(f: &StepFunction, s: f64, iv: &DyadicInterval) -> Result<f64> {
    let range = f.grid().cell_range(iv).ok_or(Error::OutsideGrid {
        time: *iv,
        freq: *iv,
    })?;
    let m = maximal_function(f, s);
    Ok(m.values()[range].iter().copied().fold(f64::INFINITY, f64::min))
}

/// Frequency point of the grid's dual cell `t`.
pub fn frequency_point(grid: &Grid, t: usize) -> DyadicPoint {
    grid.dual().cell_point(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tiles::{grid_bitiles, wave_packet};

    fn brute_size(grid: &Grid, bitiles: &[Bitile], f: &StepFunction) -> f64 {
        let mut best: f64 = 0.0;
        for iv in grid.intervals() {
            for t in 0..grid.cells() {
                let xi = frequency_point(grid, t);
                let tree = Tree::maximal(iv, xi, bitiles, TreeKind::Two);
                best = best.max(tree_size(&tree, f).unwrap());
            }
        }
        best
    }

    fn test_function(grid: Grid) -> StepFunction {
        let vals = (0..grid.cells())
            .map(|c| ((c * 37 + 11) % 17) as f64 / 8.0 - 1.0)
            .collect();
        StepFunction::scalar(grid, vals).unwrap()
    }

    #[test]
    fn size_examples() {
        let g = Grid::new(1, 1);
        let p = Bitile::from_indices(0, 1, 0);
        let f = wave_packet(&p.lower(), &g).unwrap();
        let tree = Tree::new(p.time(), p.freq_upper().left(), vec![p], TreeKind::Two).unwrap();
        assert!((tree_size(&tree, &f).unwrap() - 1.0).abs() < 1e-12);
        let bad = Tree::new(p.time(), p.freq_lower().left(), vec![p], TreeKind::General).unwrap();
        assert_eq!(tree_size(&bad, &f), Err(Error::NotATwoTree));
        assert!((collection_size(&[p], &f).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(collection_size(&[], &f).unwrap(), 0.0);
        let f2 = f.scale(2.0);
        assert!((tree_size(&tree, &f2).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn size_matches_brute_force() {
        let g = Grid::new(2, 2);
        let f = test_function(g);
        let all = grid_bitiles(&g);
        let subsets = [all.clone(), all.iter().step_by(3).copied().collect::<Vec<_>>()];
        for s in &subsets {
            let fast = collection_size(s, &f).unwrap();
            assert!((fast - brute_size(&g, s, &f)).abs() < 1e-12);
        }
    }

    #[test]
    fn selection_partitions_and_bounds() {
        let g = Grid::new(2, 2);
        let f = test_function(g);
        let all = grid_bitiles(&g);
        let levels = select_forest(&all, &f).unwrap();
        let mut seen: Vec<Bitile> = levels.iter().flat_map(|l| l.bitiles.clone()).collect();
        seen.sort();
        let mut want = all.clone();
        want.sort();
        assert_eq!(seen, want);
        for l in &levels {
            let s = collection_size(&l.bitiles, &f).unwrap();
            assert!(s <= 2f64.powi(-l.n) * (1.0 + 1e-12));
        }
        assert!(select_forest(&[], &f).unwrap().is_empty());
    }

    #[test]
    fn selection_single_bitile() {
        let g = Grid::new(0, 1);
        let p = Bitile::from_indices(0, 0, 0);
        let f = wave_packet(&p.lower(), &g).unwrap();
        let levels = select_forest(&[p], &f).unwrap();
        assert_eq!(levels.len(), 1);
        assert_eq!(levels[0].n, 0);
        assert_eq!(levels[0].bitiles, vec![p]);
        assert_eq!(levels[0].forest.len(), 1);
    }

    #[test]
    fn zero_coefficients_go_to_a_zero_size_level() {
        let g = Grid::new(1, 1);
        let f = StepFunction::zeros(g, 1);
        let all = grid_bitiles(&g);
        let levels = select_forest(&all, &f).unwrap();
        assert_eq!(levels.len(), 1);
        assert!(levels[0].zero_size);
        assert_eq!(levels[0].bitiles.len(), all.len());
    }

    #[test]
    fn split_examples() {
        let p = Bitile::from_indices(0, 0, 0);
        let q = Bitile::from_indices(1, 0, 0);
        let two = Tree::new(
            DyadicInterval::new(1, 0),
            DyadicPoint::from_f64(1.5).unwrap(),
            vec![p],
            TreeKind::Two,
        )
        .unwrap();
        let s = split_forest(&[p], &Forest::new(vec![two])).unwrap();
        assert_eq!(s.two_tree_bitiles, vec![p]);
        assert!(s.one_tree_bitiles.is_empty());

        // ξ = 0 is in the lower half of both frequency intervals
        let one = Tree::new(
            DyadicInterval::new(1, 0),
            DyadicPoint::zero(),
            vec![p, q],
            TreeKind::General,
        )
        .unwrap();
        let s = split_forest(&[p, q], &Forest::new(vec![one])).unwrap();
        assert_eq!(s.one_tree_bitiles, vec![p, q]);
        assert!(s.two_tree_forest.is_empty());
        assert_eq!(s.one_tree_forest.len(), 1);

        let far = Bitile::from_indices(0, 1, 0);
        assert_eq!(
            split_forest(&[far], &Forest::new(vec![])).unwrap_err(),
            Error::Coverage(1)
        );
    }

    #[test]
    fn exceptional_examples() {
        let g = Grid::new(1, 0);
        let t = Tree::new(DyadicInterval::new(0, 0), DyadicPoint::zero(), vec![], TreeKind::General)
            .unwrap();
        assert!(exceptional_counting(&Forest::new(vec![t.clone()]), 1.0, &g).is_empty());
        let two = Forest::new(vec![t.clone(), t]);
        assert_eq!(exceptional_counting(&two, 1.0, &g).mask(), &[true, false]);
        assert!(exceptional_counting(&two, 2.0, &g).is_empty());

        let f_set = ExceptionalSet::from_intervals(g, &[DyadicInterval::new(0, 0)]).unwrap();
        assert_eq!(exceptional_maximal(&f_set, 1.0, 0.6).mask(), &[true, false]);
        assert!(exceptional_maximal(&f_set, 2.0, 1.1).is_empty());
        let whole = ExceptionalSet::from_intervals(g, &[DyadicInterval::new(1, 0)]).unwrap();
        assert_eq!(exceptional_maximal(&whole, 2.0, 1.0).count(), 2);
    }

    #[test]
    fn variation_set_single_bitile() {
        let g = Grid::new(2, 1);
        let p = Bitile::from_indices(0, 1, 1);
        let tree = Tree::new(p.time(), p.freq_upper().left(), vec![p], TreeKind::Two).unwrap();
        let forest = Forest::new(vec![tree]);
        let one = |_: &Bitile| 1.0;
        let zero = |_: &Bitile| 0.0;
        assert!(exceptional_variation(&forest, &zero, 0.1, 2.5, &g).is_empty());
        // 2 |I_P|^{-1/2} = 2
        let e = exceptional_variation(&forest, &one, 1.9, 2.5, &g);
        assert_eq!(e.cells().collect::<Vec<_>>(), vec![2, 3]);
        assert!(exceptional_variation(&forest, &one, 2.0, 2.5, &g).is_empty());
        let incl = exceptional_variation_with(&forest, &one, 1.9, 2.5, &g, Truncation::Inclusive);
        assert_eq!(incl, e);
    }
}
