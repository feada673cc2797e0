use super::{Bitile, Rect};
use crate::dyadic::Grid;

/// Dense numbering of the bitiles of a grid, in the order of
/// [`grid_bitiles`](super::grid_bitiles): scale `i` from `1 - k` to `j`, then
/// time index, then frequency index. Each scale holds `N / 2` bitiles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BitileIndex {
    grid: Grid,
}

impl BitileIndex {
    pub fn new(grid: Grid) -> Self {
        Self { grid }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn min_scale(&self) -> i32 {
        1 - self.grid.k as i32
    }

    pub fn per_scale(&self) -> usize {
        self.grid.cells() / 2
    }

    pub fn len(&self) -> usize {
        if self.grid.bits() == 0 {
            0
        } else {
            self.per_scale() * self.grid.bits() as usize
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn id(&self, p: &Bitile) -> Option<usize> {
        if !p.fits(&self.grid) {
            return None;
        }
        let i = p.scale();
        let off = (i - self.min_scale()) as usize;
        let fbits = (self.grid.k as i32 + i - 1) as u32;
        Some(off * self.per_scale() + ((p.time().index << fbits) | p.freq().index) as usize)
    }

    pub fn bitile(&self, id: usize) -> Bitile {
        let off = id / self.per_scale();
        let rest = id % self.per_scale();
        let i = self.min_scale() + off as i32;
        let fbits = (self.grid.k as i32 + i - 1) as u32;
        Bitile::from_indices(i, (rest >> fbits) as u64, (rest & ((1 << fbits) - 1)) as u64)
    }
}
