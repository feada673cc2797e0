use super::StepFunction;

/// An index of the dyadic filtration: intervals of length `2^k`, or the
/// trivial limit `k = ∞` where the conditional expectation is zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Finite(i32),
    Infinity,
}

impl From<i32> for Level {
    fn from(k: i32) -> Self {
        Level::Finite(k)
    }
}

/// `E(f | D_k)`: averages over the dyadic intervals of length `2^k`.
///
/// Scales below the grid resolution return `f`, scales at or above `j`
/// average over the whole domain, and `k = ∞` gives zero.
pub fn conditional_expectation(f: &StepFunction, k: impl Into<Level>) -> StepFunction {
    let grid = f.grid();
    let k = match k.into() {
        Level::Infinity => return StepFunction::zeros(grid, f.dim()),
        Level::Finite(k) => k.clamp(grid.min_scale(), grid.max_scale()),
    };
    let block = 1usize << (k - grid.min_scale()) as u32;
    let dim = f.dim();
    let mut out = f.clone();
    let inv = 1.0 / block as f64;
    for chunk in out.values_mut().chunks_exact_mut(block * dim) {
        let mut mean = vec![0.0; dim];
        for cell in chunk.chunks_exact(dim) {
            for (m, v) in mean.iter_mut().zip(cell) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m *= inv);
        for cell in chunk.chunks_exact_mut(dim) {
            cell.copy_from_slice(&mean);
        }
    }
    out
}

/// All filtration levels from the coarsest grid scale `j` down to `-k`,
/// in that order.
pub fn martingale_levels(f: &StepFunction) -> Vec<StepFunction> {
    let grid = f.grid();
    (grid.min_scale()..=grid.max_scale())
        .rev()
        .map(|k| conditional_expectation(f, k))
        .collect()
}

/// Per-scale averages of a nonnegative cell vector, finest scale first:
/// `out[s][m]` is the mean over the `m`-th interval of length `2^(s - k)`.
pub(crate) fn dyadic_means(cells: &[f64]) -> Vec<Vec<f64>> {
    let mut levels = vec![cells.to_vec()];
    while levels.last().unwrap().len() > 1 {
        let prev = levels.last().unwrap();
        let next = prev.chunks_exact(2).map(|p| 0.5 * (p[0] + p[1])).collect();
        levels.push(next);
    }
    levels
}

/// Dyadic maximal function `M_s f(x) = sup_{x ∈ I} (|I|^-1 ∫_I |f|^s)^{1/s}`
/// over intervals resolved by the grid.
pub fn maximal_function(f: &StepFunction, s: f64) -> StepFunction {
    assert!(s >= 1.0, "maximal function exponent must be at least 1");
    let powered: Vec<f64> = f.pointwise_norm().iter().map(|a| a.powf(s)).collect();
    let means = dyadic_means(&powered);
    let n = powered.len();
    let vals = (0..n)
        .map(|c| {
            means
                .iter()
                .enumerate()
                .map(|(lvl, m)| m[c >> lvl])
                .fold(0.0, f64::max)
                .powf(1.0 / s)
        })
        .collect();
    StepFunction::scalar(f.grid(), vals).expect("same grid")
}
