//! Reproducible random inputs. Every generator is a pure function of its seed.

use clap::ValueEnum;
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;
use walsh_tf::dyadic::{DyadicInterval, Grid, StepFunction};
use walsh_tf::rng::{stream_rng, Rng};
use walsh_tf::size::ExceptionalSet;
use walsh_tf::tiles::{grid_bitiles, grid_tiles, wave_packet, Bitile, Tile, Tree, TreeKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InputKind {
    /// Indicator of a union of random dyadic intervals.
    IndicatorSet,
    /// Independent standard normal cell values.
    RandomAmplitudes,
    /// A few wave packets with normal coefficients.
    WavePacketCombo,
}

impl InputKind {
    pub const ALL: [Self; 3] = [Self::IndicatorSet, Self::RandomAmplitudes, Self::WavePacketCombo];

    pub fn name(self) -> &'static str {
        match self {
            Self::IndicatorSet => "indicator-set",
            Self::RandomAmplitudes => "random-amplitudes",
            Self::WavePacketCombo => "wave-packet-combo",
        }
    }
}

pub fn random_interval(grid: &Grid, rng: &mut Rng) -> DyadicInterval {
    let s = rng.random_range(grid.min_scale()..=grid.max_scale());
    let m = rng.random_range(0..1u64 << (grid.j as i32 - s));
    DyadicInterval::new(s, m)
}

/// A union of one to four random dyadic intervals; never empty.
pub fn random_dyadic_set(grid: &Grid, seed: u64) -> ExceptionalSet {
    let mut rng = stream_rng(seed, 10);
    let n = rng.random_range(1..=4);
    let ivs: Vec<DyadicInterval> = (0..n).map(|_| random_interval(grid, &mut rng)).collect();
    ExceptionalSet::from_intervals(*grid, &ivs).expect("intervals drawn inside the grid")
}

pub fn gaussian_function(grid: &Grid, dim: usize, seed: u64) -> StepFunction {
    let mut rng = stream_rng(seed, 11);
    let v = (0..grid.cells() * dim).map(|_| StandardNormal.sample(&mut rng)).collect();
    StepFunction::new(*grid, dim, v).expect("sized to the grid")
}

pub fn wave_packet_combo(grid: &Grid, terms: &[(Tile, f64)]) -> walsh_tf::Result<StepFunction> {
    let mut f = StepFunction::zeros(*grid, 1);
    for (p, a) in terms {
        f = f.add(&wave_packet(p, grid)?.scale(*a))?;
    }
    Ok(f)
}

/// A scalar input of the given kind.
pub fn generate_inputs(kind: InputKind, grid: &Grid, seed: u64) -> StepFunction {
    match kind {
        InputKind::IndicatorSet => random_dyadic_set(grid, seed).indicator(),
        InputKind::RandomAmplitudes => gaussian_function(grid, 1, seed),
        InputKind::WavePacketCombo => {
            let mut rng = stream_rng(seed, 12);
            let tiles = grid_tiles(grid);
            let n = rng.random_range(1..=4);
            let terms: Vec<(Tile, f64)> = (0..n)
                .map(|_| {
                    let p = tiles[rng.random_range(0..tiles.len())];
                    (p, StandardNormal.sample(&mut rng))
                })
                .collect();
            wave_packet_combo(grid, &terms).expect("grid tiles fit")
        }
    }
}

/// Each grid bitile kept independently with probability `prob`.
pub fn random_bitiles(grid: &Grid, prob: f64, seed: u64) -> Vec<Bitile> {
    let mut rng = stream_rng(seed, 13);
    grid_bitiles(grid)
        .into_iter()
        .filter(|_| rng.random_bool(prob))
        .collect()
}

/// A nonempty random subset of the maximal 2-tree of a random top.
pub fn random_two_tree(grid: &Grid, seed: u64) -> Tree {
    let mut rng = stream_rng(seed, 14);
    let all = grid_bitiles(grid);
    loop {
        let top = random_interval(grid, &mut rng);
        let xi = grid.dual().cell_point(rng.random_range(0..grid.cells()));
        let max = Tree::maximal(top, xi.clone(), &all, TreeKind::Two);
        let keep: Vec<Bitile> = max
            .bitiles()
            .iter()
            .filter(|_| rng.random_bool(0.6))
            .copied()
            .collect();
        if !keep.is_empty() {
            return Tree::new(top, xi, keep, TreeKind::Two).expect("subset of a 2-tree");
        }
    }
}
