//! Greedy ball covers of finite point sets in `R^d` and the multiscale chain
//! representation built on them.

use crate::error::{Error, Result};

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// First-fit cover: scan the points in order, make every uncovered point a
/// center and mark everything within `radius` as covered.
pub fn greedy_cover(points: &[Vec<f64>], radius: f64) -> Vec<usize> {
    let mut covered = vec![false; points.len()];
    let mut centers = Vec::new();
    for i in 0..points.len() {
        if covered[i] {
            continue;
        }
        centers.push(i);
        for j in i..points.len() {
            if !covered[j] && dist(&points[i], &points[j]) <= radius {
                covered[j] = true;
            }
        }
    }
    centers
}

/// Centers of a cover by closed balls of radius `λ` centered in the set.
///
/// A cover at a smaller radius also covers at `λ`, so the first-fit cover is
/// run at `λ` and at each pairwise distance below it and the smallest is
/// kept. The count is therefore nonincreasing in `λ`.
pub fn cover_centers(points: &[Vec<f64>], lambda: f64) -> Vec<usize> {
    assert!(lambda > 0.0, "cover radius must be positive");
    let mut radii = vec![lambda];
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let d = dist(&points[i], &points[j]);
            if d < lambda {
                radii.push(d);
            }
        }
    }
    radii.sort_by(|a, b| b.total_cmp(a));
    radii.dedup();
    let mut best = greedy_cover(points, lambda);
    for &r in &radii[1..] {
        let c = greedy_cover(points, r);
        if c.len() < best.len() {
            best = c;
        }
    }
    best
}

/// `N_λ`: number of balls of radius `λ` centered in `C` needed to cover `C`,
/// as counted by [`cover_centers`]. An upper bound for the true minimum.
pub fn covering_number(points: &[Vec<f64>], lambda: f64) -> usize {
    cover_centers(points, lambda).len()
}

pub fn diameter(points: &[Vec<f64>]) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            d = d.max(dist(&points[i], &points[j]));
        }
    }
    d
}

/// One scale of a [`ChainDecomposition`].
#[derive(Debug, Clone)]
pub struct ChainLevel {
    /// The scale: balls of radius `2^-n`.
    pub n: i32,
    /// Indices (into the distinct points) of the centers `B_n`.
    pub centers: Vec<usize>,
    /// For each center, its link in `B_{n-1}`; `None` is the origin.
    pub parents: Vec<Option<usize>>,
    /// `C_n = {c - c'} ∪ {0}` with duplicates removed.
    pub differences: Vec<Vec<f64>>,
}

/// Every point written as `c = Σ_n c_n` with `c_n ∈ C_n`, `|c_n| ≤ 2^{-n+2}`.
#[derive(Debug, Clone)]
pub struct ChainDecomposition {
    pub dim: usize,
    /// Distinct input points, in first-seen order.
    pub points: Vec<Vec<f64>>,
    /// `ceil(-log₂ diam)`; `B_{n0-1} = {0}`.
    pub n0: i32,
    pub levels: Vec<ChainLevel>,
    /// For every distinct point, its terms `(n, c_n)` with `c_n ≠ 0`.
    pub representations: Vec<Vec<(i32, Vec<f64>)>>,
}

/// Builds the chain decomposition of a finite set containing the origin.
pub fn chain_decompose(points: &[Vec<f64>]) -> Result<ChainDecomposition> {
    let dim = points.first().map_or(0, Vec::len);
    if points.iter().any(|p| p.len() != dim) {
        return Err(Error::DimensionMismatch(dim, 0));
    }
    let mut distinct: Vec<Vec<f64>> = Vec::new();
    for p in points {
        if !distinct.contains(p) {
            distinct.push(p.clone());
        }
    }
    let Some(origin) = distinct.iter().position(|p| p.iter().all(|&x| x == 0.0)) else {
        return Err(Error::PreconditionViolated("the set must contain 0".into()));
    };
    let d = diameter(&distinct);
    if d == 0.0 {
        return Ok(ChainDecomposition {
            dim,
            points: distinct,
            n0: 0,
            levels: Vec::new(),
            representations: vec![Vec::new()],
        });
    }
    let n0 = (-d.log2()).ceil() as i32;
    let mut levels: Vec<ChainLevel> = Vec::new();
    // B_{n0-1} = {0}
    let mut prev: Vec<usize> = vec![origin];
    let mut prev_is_origin = true;
    let mut n = n0;
    loop {
        let radius = 2f64.powi(-n);
        let centers = cover_centers(&distinct, radius);
        let mut parents = Vec::with_capacity(centers.len());
        let mut diffs: Vec<Vec<f64>> = vec![vec![0.0; dim]];
        for &c in &centers {
            let (best, _) = prev
                .iter()
                .enumerate()
                .map(|(k, &b)| (k, dist(&distinct[c], &distinct[b])))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("nonempty previous level");
            let parent = if prev_is_origin { None } else { Some(best) };
            let base = &distinct[prev[best]];
            let diff: Vec<f64> = distinct[c].iter().zip(base).map(|(a, b)| a - b).collect();
            if !diffs.contains(&diff) {
                diffs.push(diff);
            }
            parents.push(parent);
        }
        let done = centers.len() == distinct.len();
        levels.push(ChainLevel {
            n,
            centers: centers.clone(),
            parents,
            differences: diffs,
        });
        if done {
            break;
        }
        prev = centers;
        prev_is_origin = false;
        n += 1;
    }
    let mut representations = Vec::with_capacity(distinct.len());
    let last = levels.len() - 1;
    for p in 0..distinct.len() {
        let mut terms = Vec::new();
        let mut slot = levels[last]
            .centers
            .iter()
            .position(|&c| c == p)
            .expect("every point is a final center");
        for li in (0..=last).rev() {
            let lvl = &levels[li];
            let c = lvl.centers[slot];
            let base: Vec<f64> = match lvl.parents[slot] {
                None => vec![0.0; dim],
                Some(s) => distinct[levels[li - 1].centers[s]].clone(),
            };
            let diff: Vec<f64> = distinct[c].iter().zip(&base).map(|(a, b)| a - b).collect();
            if norm(&diff) > 0.0 {
                terms.push((lvl.n, diff));
            }
            match lvl.parents[slot] {
                None => break,
                Some(s) => slot = s,
            }
        }
        terms.reverse();
        representations.push(terms);
    }
    Ok(ChainDecomposition {
        dim,
        points: distinct,
        n0,
        levels,
        representations,
    })
}

impl ChainDecomposition {
    /// Largest `|c - Σ c_n|` over the points.
    pub fn representation_error(&self) -> f64 {
        self.points
            .iter()
            .zip(&self.representations)
            .map(|(p, terms)| {
                let mut s = vec![0.0; self.dim];
                for (_, t) in terms {
                    s.iter_mut().zip(t).for_each(|(a, b)| *a += b);
                }
                dist(p, &s)
            })
            .fold(0.0, f64::max)
    }

    /// Largest `|c_n| 2^{n-2}` over all levels; at most one when the norm
    /// bounds hold.
    pub fn norm_bound_ratio(&self) -> f64 {
        self.levels
            .iter()
            .flat_map(|l| l.differences.iter().map(move |c| norm(c) * 2f64.powi(l.n - 2)))
            .fold(0.0, f64::max)
    }

    /// Every representation term lies in its level's `C_n`.
    pub fn terms_are_members(&self) -> bool {
        self.representations.iter().flatten().all(|(n, c)| {
            self.levels
                .iter()
                .find(|l| l.n == *n)
                .is_some_and(|l| l.differences.contains(c))
        })
    }

    /// `|C_n| ≤ N_{2^-n} + 1` at every level.
    pub fn cardinality_bounds_hold(&self) -> bool {
        self.levels
            .iter()
            .all(|l| l.differences.len() <= covering_number(&self.points, 2f64.powi(-l.n)) + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn covering_examples() {
        let one = vec![vec![0.3, 0.4]];
        assert_eq!(covering_number(&one, 0.1), 1);
        let pair = vec![vec![0.0], vec![1.0]];
        assert_eq!(covering_number(&pair, 0.4), 2);
        assert_eq!(covering_number(&pair, 1.0), 1);
        assert_eq!(covering_number(&pair, diameter(&pair)), 1);
    }

    #[test]
    fn envelope_is_monotone() {
        let pts: Vec<Vec<f64>> = (0..12).map(|i| vec![((i * 7) % 12) as f64 * 0.37]).collect();
        let counts: Vec<usize> = (1..90)
            .map(|s| covering_number(&pts, s as f64 * 0.05))
            .collect();
        assert!(counts.windows(2).all(|w| w[0] >= w[1]));
        assert_eq!(*counts.last().unwrap(), 1);
    }

    #[test]
    fn chain_examples() {
        let z = chain_decompose(&[vec![0.0, 0.0]]).unwrap();
        assert!(z.levels.is_empty());
        assert_eq!(z.representations, vec![Vec::<(i32, Vec<f64>)>::new()]);

        let c = chain_decompose(&[vec![0.0], vec![1.0]]).unwrap();
        assert_eq!(c.n0, 0);
        assert_eq!(c.representations[1], vec![(1, vec![1.0])]);
        assert_eq!(c.representation_error(), 0.0);
        assert!(c.norm_bound_ratio() <= 1.0);
        assert!(chain_decompose(&[vec![1.0]]).is_err());
    }

    #[test]
    fn chain_properties_on_a_spread_set() {
        let pts: Vec<Vec<f64>> = (0..20)
            .map(|i| {
                let t = i as f64;
                vec![(t * 0.7).sin() * t / 10.0, (t * 1.3).cos() * 0.5]
            })
            .chain(std::iter::once(vec![0.0, 0.0]))
            .collect();
        let c = chain_decompose(&pts).unwrap();
        assert!(c.representation_error() < 1e-12);
        assert!(c.norm_bound_ratio() <= 1.0 + 1e-12);
        assert!(c.terms_are_members());
        assert!(c.cardinality_bounds_hold());
    }
}
