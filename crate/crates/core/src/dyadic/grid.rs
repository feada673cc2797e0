use std::ops::Range;

use super::{DyadicInterval, DyadicPoint};

/// Finite truncation of the dyadic step functions: the domain `[0, 2^j)` cut
/// into `2^(j+k)` cells of width `2^-k`.
///
/// The frequency side of `Grid(j, k)` is `[0, 2^k)` with cells of width
/// `2^-j`, which is itself the grid [`Grid::dual`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Grid {
    pub j: u32,
    pub k: u32,
}

impl Grid {
    pub const fn new(j: u32, k: u32) -> Self {
        Self { j, k }
    }

    pub const fn bits(&self) -> u32 {
        self.j + self.k
    }

    pub const fn cells(&self) -> usize {
        1 << (self.j + self.k)
    }

    pub fn cell_width(&self) -> f64 {
        2f64.powi(-(self.k as i32))
    }

    pub fn domain_length(&self) -> f64 {
        2f64.powi(self.j as i32)
    }

    pub const fn dual(&self) -> Self {
        Self::new(self.k, self.j)
    }

    pub fn min_scale(&self) -> i32 {
        -(self.k as i32)
    }

    pub fn max_scale(&self) -> i32 {
        self.j as i32
    }

    /// Reverse the low `bits()` bits of `t`.
    #[inline]
    pub fn bit_reverse(&self, t: usize) -> usize {
        let b = self.bits();
        if b == 0 {
            0
        } else {
            t.reverse_bits() >> (usize::BITS - b)
        }
    }

    /// `e(x ⊗ ξ)` for the left endpoints of time cell `c` and frequency cell
    /// `t` (a cell of [`Grid::dual`]).
    ///
    /// On the grid the character only depends on these cells: the digits of
    /// `x` live in `[-k, j)` and pair with digits of `ξ` in `[-j, k)`.
    #[inline]
    pub fn character(&self, c: usize, t: usize) -> f64 {
        if (c & self.bit_reverse(t)).count_ones() % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Cells covered by a dyadic interval, if it is resolved by the grid.
    pub fn cell_range(&self, iv: &DyadicInterval) -> Option<Range<usize>> {
        if iv.scale < self.min_scale() || iv.scale > self.max_scale() {
            return None;
        }
        let per = (iv.scale + self.k as i32) as u32;
        let count = 1u64 << (self.j as i32 - iv.scale);
        if iv.index >= count {
            return None;
        }
        let start = (iv.index as usize) << per;
        Some(start..start + (1 << per))
    }

    pub fn contains_interval(&self, iv: &DyadicInterval) -> bool {
        self.cell_range(iv).is_some()
    }

    /// The cell containing `x`, if `x` lies in the domain.
    pub fn cell_of(&self, x: &DyadicPoint) -> Option<usize> {
        if !x.below_pow2(self.j as i32) {
            return None;
        }
        Some(x.floor_index(self.min_scale()) as usize)
    }

    pub fn cell_point(&self, c: usize) -> DyadicPoint {
        DyadicPoint::from_scaled(c as u64, self.min_scale())
    }

    pub fn cell_interval(&self, c: usize) -> DyadicInterval {
        DyadicInterval::new(self.min_scale(), c as u64)
    }

    /// Index of the dual-grid cell whose character agrees with `e(· ⊗ ξ)` on
    /// this grid's points. Digits of `ξ` outside `[-j, k)` never pair with a
    /// grid digit, so they are dropped.
    pub fn frequency_cell(&self, xi: &DyadicPoint) -> usize {
        let mut t = 0usize;
        for n in xi.digits() {
            let b = n + self.j as i32;
            if b >= 0 && (b as u32) < self.bits() {
                t |= 1 << b;
            }
        }
        t
    }

    /// Every dyadic interval resolved by the grid, finest scale first.
    pub fn intervals(&self) -> impl Iterator<Item = DyadicInterval> + '_ {
        (self.min_scale()..=self.max_scale()).flat_map(move |s| {
            let count = 1u64 << (self.j as i32 - s);
            (0..count).map(move |m| DyadicInterval::new(s, m))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::character;

    #[test]
    fn grid_character_matches_digit_formula() {
        for (j, k) in [(0, 3), (2, 1), (1, 2), (3, 3)] {
            let g = Grid::new(j, k);
            let d = g.dual();
            for c in 0..g.cells() {
                let x = g.cell_point(c);
                for t in 0..d.cells() {
                    let xi = d.cell_point(t);
                    assert_eq!(g.character(c, t), f64::from(character(&x, &xi)));
                    assert_eq!(g.frequency_cell(&xi), t);
                }
            }
        }
    }

    #[test]
    fn ranges_and_cells() {
        let g = Grid::new(2, 1);
        assert_eq!(g.cells(), 8);
        assert_eq!(g.cell_range(&DyadicInterval::new(1, 1)), Some(4..8));
        assert_eq!(g.cell_range(&DyadicInterval::new(-1, 7)), Some(7..8));
        assert_eq!(g.cell_range(&DyadicInterval::new(-2, 0)), None);
        assert_eq!(g.cell_range(&DyadicInterval::new(2, 1)), None);
        assert_eq!(g.cell_of(&DyadicPoint::from_f64(2.5).unwrap()), Some(5));
        assert_eq!(g.cell_of(&DyadicPoint::from_f64(4.0).unwrap()), None);
        assert_eq!(g.intervals().count(), 8 + 4 + 2 + 1);
    }
}
