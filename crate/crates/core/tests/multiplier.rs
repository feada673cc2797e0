mod common;

use proptest::prelude::*;
use rand_distr::{Distribution, StandardNormal};
use walsh_tf::dyadic::Grid;
use walsh_tf::multiplier::{
    chain_decompose, covering_number, diameter, m2star_lower, m2star_oracle, m2star_upper,
    omega_k, weight_variation, FrequencySet, MultiplierFamily, WeightFamily,
};
use walsh_tf::variation::{variation_norm, KSequence};

fn points(seed: u64) -> Vec<Vec<f64>> {
    let mut rng = common::rng(seed);
    let d: usize = rng.random_range(1..=4);
    let n: usize = rng.random_range(1..=31);
    let scale = 2f64.powi(rng.random_range(-3i32..=3));
    let mut pts: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..d).map(|_| { let z: f64 = StandardNormal.sample(&mut rng); scale * z }).collect::<Vec<f64>>())
        .collect();
    pts.insert(rng.random_range(0..=pts.len()), vec![0.0; d]);
    pts
}

proptest! {
    #[test]
    fn chain_decomposition_postconditions(seed in any::<u64>()) {
        let c = chain_decompose(&points(seed)).unwrap();
        prop_assert!(c.representation_error() < 1e-12);
        prop_assert!(c.norm_bound_ratio() <= 1.0 + 1e-12);
        prop_assert!(c.terms_are_members());
        prop_assert!(c.cardinality_bounds_hold());
    }

    #[test]
    fn covering_number_is_monotone(seed in any::<u64>()) {
        let pts = points(seed);
        let d = diameter(&pts);
        let mut last = usize::MAX;
        for i in 1..=40 {
            let n = covering_number(&pts, d.max(1e-3) * i as f64 / 32.0);
            prop_assert!(n <= last);
            last = n;
        }
        prop_assert_eq!(covering_number(&pts, d.max(1e-9)), 1);
    }

    #[test]
    fn omega_chains_are_nested(seed in any::<u64>(), n in 1usize..10) {
        let g = Grid::new(2, 3);
        let xi = FrequencySet::random(g, n.min(g.cells()), seed).unwrap();
        for k in xi.k_bounds() {
            let om = omega_k(&xi, k).unwrap();
            prop_assert!(om.len() <= xi.len());
            for &t in xi.cells() {
                let w = xi.interval_of(t, k);
                prop_assert!(om.contains(&w));
                if k > *xi.k_bounds().start() {
                    prop_assert!(xi.interval_of(t, k - 1).contains(&w));
                }
            }
        }
    }

    #[test]
    fn weight_variation_matches_chain_enumeration(seed in any::<u64>()) {
        let g = Grid::new(2, 2);
        let xi = FrequencySet::random(g, 3, seed).unwrap();
        let w = WeightFamily::gaussian(&xi, xi.k_bounds(), seed).unwrap();
        let keys: Vec<i32> = xi.k_bounds().rev().collect();
        let mut best: f64 = 0.0;
        for &t in xi.cells() {
            let v: Vec<f64> = keys.iter().map(|&k| w.get(k, &xi.interval_of(t, k)).unwrap()).collect();
            best = best.max(variation_norm(&KSequence::scalar(keys.clone(), v).unwrap(), 2.5));
        }
        prop_assert!((weight_variation(&w, &xi, 2.5).unwrap() - best).abs() < 1e-12);
    }

}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn m2star_sandwich(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let (j, k) = [(0, 1), (1, 0), (1, 1), (2, 1), (1, 2), (0, 3), (3, 0)][rng.random_range(0..7)];
        let g = Grid::new(j, k);
        let members: Vec<Vec<f64>> = (0..rng.random_range(1..=4))
            .map(|_| (0..g.cells()).map(|_| StandardNormal.sample(&mut rng)).collect())
            .collect();
        let fam = MultiplierFamily::new(g, members).unwrap();
        let lo = m2star_lower(&fam, 32, seed);
        let or = m2star_oracle(&fam).unwrap();
        let up = m2star_upper(&fam);
        prop_assert!(lo.value <= or + 1e-9);
        prop_assert!(or <= up + 1e-9);
        let sup = fam.members().iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
        prop_assert!(or >= sup - 1e-9);
        prop_assert!((fam.maximal_norm(&lo.witness).unwrap() - lo.value).abs() < 1e-9);
    }
}
