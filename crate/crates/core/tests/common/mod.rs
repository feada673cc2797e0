#![allow(dead_code)]

use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use walsh_tf::dyadic::{DyadicInterval, Grid, StepFunction};
use walsh_tf::rng::{stream_rng, Rng};
use walsh_tf::tiles::{grid_bitiles, Bitile, Tree, TreeKind};

pub fn rng(seed: u64) -> Rng {
    stream_rng(seed, 0)
}

pub fn gaussian(grid: Grid, dim: usize, rng: &mut Rng) -> StepFunction {
    let v = (0..grid.cells() * dim).map(|_| StandardNormal.sample(rng)).collect();
    StepFunction::new(grid, dim, v).unwrap()
}

pub fn random_interval(grid: &Grid, rng: &mut Rng) -> DyadicInterval {
    let s = rng.random_range(grid.min_scale()..=grid.max_scale());
    let m = rng.random_range(0..1u64 << (grid.j as i32 - s));
    DyadicInterval::new(s, m)
}

/// A random subset of the maximal 2-tree of a random top; never empty.
pub fn random_two_tree(grid: &Grid, rng: &mut Rng) -> Tree {
    let all = grid_bitiles(grid);
    loop {
        let top = random_interval(grid, rng);
        let xi = grid.dual().cell_point(rng.random_range(0..grid.cells()));
        let max = Tree::maximal(top, xi.clone(), &all, TreeKind::Two);
        let keep: Vec<Bitile> = max
            .bitiles()
            .iter()
            .filter(|_| rng.random_bool(0.6))
            .copied()
            .collect();
        if !keep.is_empty() {
            return Tree::new(top, xi, keep, TreeKind::Two).unwrap();
        }
    }
}

pub fn random_bitiles(grid: &Grid, prob: f64, rng: &mut Rng) -> Vec<Bitile> {
    grid_bitiles(grid)
        .into_iter()
        .filter(|_| rng.random_bool(prob))
        .collect()
}
