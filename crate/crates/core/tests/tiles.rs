mod common;

use proptest::prelude::*;
use walsh_tf::dyadic::{conditional_expectation, walsh_fourier, Grid, StepFunction};
use walsh_tf::tiles::{
    grid_tiles, parse_bitiles, wave_packet, write_bitiles, Rect, TileCoefficients,
};

proptest! {
    #[test]
    fn packets_are_orthonormal(seed in any::<u64>()) {
        let g = Grid::new(2, 3);
        let tiles = grid_tiles(&g);
        let mut rng = common::rng(seed);
        let p = tiles[rng.random_range(0..tiles.len())];
        let q = tiles[rng.random_range(0..tiles.len())];
        let (wp, wq) = (wave_packet(&p, &g).unwrap(), wave_packet(&q, &g).unwrap());
        prop_assert!((wp.inner(&wp).unwrap() - 1.0).abs() < 1e-12);
        if p.is_disjoint_from(&q) {
            prop_assert!(wp.inner(&wq).unwrap().abs() < 1e-12);
        }
        let band = g.dual().cell_range(&p.freq()).unwrap();
        for (t, v) in walsh_fourier(&wp).values().iter().enumerate() {
            if !band.contains(&t) {
                prop_assert_eq!(*v, 0.0);
            }
        }
    }

    #[test]
    fn two_tree_lower_tiles_are_disjoint(seed in any::<u64>()) {
        let g = Grid::new(3, 2);
        let t = common::random_two_tree(&g, &mut common::rng(seed));
        prop_assert!(t.is_two_tree());
        prop_assert!(t.top_dominates(&g));
        let b = t.bitiles();
        for i in 0..b.len() {
            for j in i + 1..b.len() {
                prop_assert!(b[i].lower().is_disjoint_from(&b[j].lower()));
            }
        }
    }

    #[test]
    fn two_tree_partial_sums_are_expectations(seed in any::<u64>()) {
        // e(ξ_T ⊗ x) Σ_{|I_P| ≥ 2^k} a_P w_{P₁} = E(e(ξ_T ⊗ ·) Σ_P a_P w_{P₁} | D_{k-1})
        let g = Grid::new(3, 2);
        let mut rng = common::rng(seed);
        let t = common::random_two_tree(&g, &mut rng);
        let f = common::gaussian(g, 1, &mut rng);
        let coeffs = TileCoefficients::new(&f).unwrap();
        let xi = g.frequency_cell(t.top_freq());
        let e: Vec<f64> = (0..g.cells()).map(|c| g.character(c, xi)).collect();
        let sum_over = |keep: &dyn Fn(i32) -> bool| {
            let mut s = StepFunction::zeros(g, 1);
            for p in t.bitiles().iter().filter(|p| keep(p.scale())) {
                let w = wave_packet(&p.lower(), &g).unwrap().scale(coeffs.lower(p).unwrap());
                s = s.add(&w).unwrap();
            }
            s
        };
        let full = sum_over(&|_| true).modulate(&e).unwrap();
        for k in g.min_scale()..=g.max_scale() + 1 {
            let lhs = sum_over(&|i| i >= k).modulate(&e).unwrap();
            let rhs = conditional_expectation(&full, k - 1);
            prop_assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-12, "k = {}", k);
        }
    }

    #[test]
    fn bitile_text_round_trip(seed in any::<u64>()) {
        let g = Grid::new(2, 2);
        let s = common::random_bitiles(&g, 0.3, &mut common::rng(seed));
        prop_assert_eq!(parse_bitiles(&write_bitiles(&s)).unwrap(), s);
    }
}
