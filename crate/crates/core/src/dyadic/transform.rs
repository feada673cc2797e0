//! Fast Walsh–Fourier transform on a grid.
//!
//! On `Grid(j, k)` the character pairing is `e(x ⊗ ξ) = (-1)^{popcount(c & rev(t))}`
//! where `rev` reverses `j + k` bits, so the transform is a natural-order
//! Hadamard butterfly followed by a bit-reversal permutation.

use super::{Grid, StepFunction};

/// Unnormalized in-place Walsh–Hadamard butterfly:
/// `out[s] = sum_c data[c] * (-1)^{popcount(c & s)}`.
pub fn fwht(data: &mut [f64]) {
    let n = data.len();
    assert!(n.is_power_of_two(), "fwht length must be a power of two");
    let mut half = 1;
    while half < n {
        for block in data.chunks_exact_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        half <<= 1;
    }
}

/// `out[t] = scale * sum_c data[c] e(c ⊗ t)` on a grid, in place.
pub(crate) fn character_sum(grid: &Grid, data: &mut [f64], scale: f64, scratch: &mut Vec<f64>) {
    fwht(data);
    scratch.clear();
    scratch.extend_from_slice(data);
    for (t, out) in data.iter_mut().enumerate() {
        *out = scale * scratch[grid.bit_reverse(t)];
    }
}

/// Walsh–Fourier transform `f̂(ξ) = ∫ e(x ⊗ ξ) f(x) dx`.
///
/// The result lives on the dual grid; applying the transform twice returns
/// the original function.
pub fn walsh_fourier(f: &StepFunction) -> StepFunction {
    let grid = f.grid();
    let dim = f.dim();
    let n = grid.cells();
    let w = grid.cell_width();
    let mut out = vec![0.0; n * dim];
    let mut buf = vec![0.0; n];
    let mut scratch = Vec::with_capacity(n);
    for a in 0..dim {
        for (c, b) in buf.iter_mut().enumerate() {
            *b = f.values()[c * dim + a];
        }
        character_sum(&grid, &mut buf, w, &mut scratch);
        for (t, b) in buf.iter().enumerate() {
            out[t * dim + a] = *b;
        }
    }
    StepFunction::new(grid.dual(), dim, out).expect("dual grid has the same cell count")
}

/// Applies the multiplier `m` (a vector over the frequency cells) to a
/// scalar function: `(f̂ m)ˇ`.
pub fn apply_multiplier(f: &StepFunction, m: &[f64]) -> crate::Result<StepFunction> {
    let spectrum = walsh_fourier(f);
    let filtered = spectrum.modulate(m)?;
    Ok(walsh_fourier(&filtered))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::DyadicInterval;

    #[test]
    fn unit_interval_indicator_is_fixed() {
        for (j, k) in [(0, 0), (1, 2), (3, 1), (2, 2)] {
            let g = Grid::new(j, k);
            let f = StepFunction::indicator(g, &DyadicInterval::new(0, 0)).unwrap();
            let fh = walsh_fourier(&f);
            let expect = StepFunction::indicator(g.dual(), &DyadicInterval::new(0, 0)).unwrap();
            assert!(fh.max_abs_diff(&expect).unwrap() < 1e-15);
        }
    }

    #[test]
    fn transform_matches_direct_character_sum() {
        let g = Grid::new(2, 2);
        let vals: Vec<f64> = (0..16).map(|c| ((c * 7 + 3) % 11) as f64 - 5.0).collect();
        let f = StepFunction::scalar(g, vals.clone()).unwrap();
        let fh = walsh_fourier(&f);
        for t in 0..16 {
            let direct: f64 = (0..16)
                .map(|c| g.character(c, t) * vals[c] * g.cell_width())
                .sum();
            assert!((fh.values()[t] - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn vector_valued_components_transform_independently() {
        let g = Grid::new(1, 2);
        let vals: Vec<f64> = (0..16).map(|i| (i as f64).sin()).collect();
        let f = StepFunction::new(g, 2, vals.clone()).unwrap();
        let fh = walsh_fourier(&f);
        let first = StepFunction::scalar(g, vals.iter().step_by(2).copied().collect()).unwrap();
        let fh1 = walsh_fourier(&first);
        for t in 0..8 {
            assert!((fh.values()[2 * t] - fh1.values()[t]).abs() < 1e-14);
        }
        assert!(walsh_fourier(&fh).max_abs_diff(&f).unwrap() < 1e-13);
    }
}
