mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use walsh_tf::dyadic::Grid;
use walsh_tf::size::{collection_size, maximal_inf, select_forest, split_forest, tree_size};
use walsh_tf::tiles::{Bitile, Rect};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn two_tree_size_is_below_maximal_function(seed in any::<u64>()) {
        let g = Grid::new(3, 3);
        let mut rng = common::rng(seed);
        let t = common::random_two_tree(&g, &mut rng);
        let f = common::gaussian(g, 1, &mut rng);
        let size = tree_size(&t, &f).unwrap();
        prop_assert!(size <= maximal_inf(&f, 2.0, &t.top_time()).unwrap() + 1e-12);
    }

    #[test]
    fn selection_partitions_with_level_bounds(seed in any::<u64>()) {
        let g = Grid::new(2, 3);
        let mut rng = common::rng(seed);
        let s = common::random_bitiles(&g, 0.4, &mut rng);
        let f = common::gaussian(g, 1, &mut rng);
        let levels = select_forest(&s, &f).unwrap();
        let mut seen: Vec<Bitile> = levels.iter().flat_map(|l| l.bitiles.iter().copied()).collect();
        seen.sort();
        let mut want = s.clone();
        want.sort();
        prop_assert_eq!(&seen, &want);
        for (i, level) in levels.iter().enumerate() {
            let rest: Vec<Bitile> = levels[i..].iter().flat_map(|l| l.bitiles.iter().copied()).collect();
            let size = collection_size(&rest, &f).unwrap();
            if level.zero_size {
                prop_assert_eq!(size, 0.0);
            } else {
                prop_assert!(size <= 2f64.powi(-level.n) * (1.0 + 1e-12));
            }
            let trees: BTreeSet<Bitile> = level.forest.bitiles().copied().collect();
            prop_assert_eq!(trees.len(), level.bitiles.len());
            let split = split_forest(&level.bitiles, &level.forest).unwrap();
            prop_assert!(split.two_tree_forest.iter().all(|t| t.is_two_tree()));
            prop_assert!(split.one_tree_forest.iter().all(|t| t.is_one_tree()));
        }
        for w in levels.windows(2) {
            prop_assert!(w[0].n < w[1].n);
        }
    }

    #[test]
    fn upper_tiles_of_the_one_tree_part_are_disjoint(seed in any::<u64>()) {
        let g = Grid::new(2, 3);
        let mut rng = common::rng(seed);
        let s = common::random_bitiles(&g, 0.5, &mut rng);
        let f = common::gaussian(g, 1, &mut rng);
        for level in select_forest(&s, &f).unwrap() {
            let one = &level.one_tree_forest;
            let b: Vec<Bitile> = one.bitiles().copied().collect();
            for i in 0..b.len() {
                for j in i + 1..b.len() {
                    prop_assert!(b[i].upper().is_disjoint_from(&b[j].upper()), "{} {}", b[i], b[j]);
                }
            }
        }
    }
}
