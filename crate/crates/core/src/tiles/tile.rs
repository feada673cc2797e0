use std::fmt;
use std::str::FromStr;

use crate::dyadic::{DyadicInterval, Grid};
use crate::error::{Error, Result};

/// A dyadic time–frequency rectangle.
pub trait Rect {
    fn time(&self) -> DyadicInterval;
    fn freq(&self) -> DyadicInterval;

    fn is_disjoint_from<R: Rect>(&self, other: &R) -> bool {
        self.time().is_disjoint(&other.time()) || self.freq().is_disjoint(&other.freq())
    }
}

/// `P ≤ Q` iff `I_P ⊆ I_Q` and `ω_Q ⊆ ω_P`.
pub fn tile_le<A: Rect, B: Rect>(p: &A, q: &B) -> bool {
    q.time().contains(&p.time()) && p.freq().contains(&q.freq())
}

/// An area-one rectangle `I_P × ω_P`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tile {
    time: DyadicInterval,
    freq: DyadicInterval,
}

impl Tile {
    pub fn new(time: DyadicInterval, freq: DyadicInterval) -> Result<Self> {
        let scale_sum = time.scale + freq.scale;
        if scale_sum != 0 {
            return Err(Error::BadArea {
                time,
                freq,
                scale_sum,
            });
        }
        Ok(Self { time, freq })
    }

    /// `[2^i n, 2^i (n+1)) × [2^-i l, 2^-i (l+1))`.
    pub fn from_indices(i: i32, n: u64, l: u64) -> Self {
        Self {
            time: DyadicInterval::new(i, n),
            freq: DyadicInterval::new(-i, l),
        }
    }

    pub fn scale(&self) -> i32 {
        self.time.scale
    }

    pub fn fits(&self, grid: &Grid) -> bool {
        grid.contains_interval(&self.time) && grid.dual().contains_interval(&self.freq)
    }
}

impl Rect for Tile {
    fn time(&self) -> DyadicInterval {
        self.time
    }
    fn freq(&self) -> DyadicInterval {
        self.freq
    }
}

/// An area-two rectangle. The lower and upper tiles are derived on demand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bitile {
    time: DyadicInterval,
    freq: DyadicInterval,
}

impl Bitile {
    pub fn new(time: DyadicInterval, freq: DyadicInterval) -> Result<Self> {
        let scale_sum = time.scale + freq.scale;
        if scale_sum != 1 {
            return Err(Error::BadArea {
                time,
                freq,
                scale_sum,
            });
        }
        Ok(Self { time, freq })
    }

    /// `[2^i n, 2^i (n+1)) × [2^{1-i} l, 2^{1-i} (l+1))`.
    pub fn from_indices(i: i32, n: u64, l: u64) -> Self {
        Self {
            time: DyadicInterval::new(i, n),
            freq: DyadicInterval::new(1 - i, l),
        }
    }

    pub fn scale(&self) -> i32 {
        self.time.scale
    }

    /// `(P₁, P₂)`: the halves of `ω_P` carried over the same time interval.
    pub fn children(&self) -> (Tile, Tile) {
        let (lo, hi) = self.freq.children();
        (
            Tile {
                time: self.time,
                freq: lo,
            },
            Tile {
                time: self.time,
                freq: hi,
            },
        )
    }

    pub fn lower(&self) -> Tile {
        self.children().0
    }

    pub fn upper(&self) -> Tile {
        self.children().1
    }

    /// `ω_{P,1}`.
    pub fn freq_lower(&self) -> DyadicInterval {
        self.freq.children().0
    }

    /// `ω_{P,2}`.
    pub fn freq_upper(&self) -> DyadicInterval {
        self.freq.children().1
    }

    pub fn fits(&self, grid: &Grid) -> bool {
        grid.contains_interval(&self.time) && grid.dual().contains_interval(&self.freq)
    }
}

/// `bitile_children` as a free function.
pub fn bitile_children(p: &Bitile) -> (Tile, Tile) {
    p.children()
}

impl Rect for Bitile {
    fn time(&self) -> DyadicInterval {
        self.time
    }
    fn freq(&self) -> DyadicInterval {
        self.freq
    }
}

impl fmt::Display for Bitile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {} {}",
            self.time.scale, self.time.index, self.freq.scale, self.freq.index
        )
    }
}

impl FromStr for Bitile {
    type Err = Error;

    /// Parses `i_time m_time i_freq m_freq`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split_whitespace().collect();
        if parts.len() != 4 {
            return Err(Error::Parse(format!("expected 4 fields in bitile line {s:?}")));
        }
        let int = |x: &str| -> Result<i32> {
            x.parse().map_err(|_| Error::Parse(format!("bad scale {x:?}")))
        };
        let idx = |x: &str| -> Result<u64> {
            x.parse().map_err(|_| Error::Parse(format!("bad index {x:?}")))
        };
        Bitile::new(
            DyadicInterval::new(int(parts[0])?, idx(parts[1])?),
            DyadicInterval::new(int(parts[2])?, idx(parts[3])?),
        )
    }
}

/// One bitile per line.
pub fn write_bitiles(bitiles: &[Bitile]) -> String {
    let mut out = String::new();
    for p in bitiles {
        out.push_str(&p.to_string());
        out.push('\n');
    }
    out
}

/// Parses the line format of [`write_bitiles`]; blank lines and `#` comments
/// are skipped.
pub fn parse_bitiles(text: &str) -> Result<Vec<Bitile>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::parse)
        .collect()
}

/// Every bitile resolved by the grid, ordered by scale, then time index,
/// then frequency index.
pub fn grid_bitiles(grid: &Grid) -> Vec<Bitile> {
    let mut out = Vec::with_capacity(grid.cells() / 2 * grid.bits() as usize);
    for i in (1 - grid.k as i32)..=grid.j as i32 {
        let times = 1u64 << (grid.j as i32 - i);
        let freqs = 1u64 << (grid.k as i32 + i - 1);
        for n in 0..times {
            for l in 0..freqs {
                out.push(Bitile::from_indices(i, n, l));
            }
        }
    }
    out
}

/// Every tile resolved by the grid.
pub fn grid_tiles(grid: &Grid) -> Vec<Tile> {
    let mut out = Vec::new();
    for i in grid.min_scale()..=grid.max_scale() {
        let times = 1u64 << (grid.j as i32 - i);
        let freqs = 1u64 << (grid.k as i32 + i);
        for n in 0..times {
            for l in 0..freqs {
                out.push(Tile::from_indices(i, n, l));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn children_examples() {
        let p = Bitile::from_indices(0, 0, 0); // [0,1) x [0,2)
        let (p1, p2) = p.children();
        assert_eq!(p1, Tile::from_indices(0, 0, 0));
        assert_eq!(p2, Tile::from_indices(0, 0, 1));

        let q = Bitile::from_indices(1, 0, 0); // [0,2) x [0,1)
        let (q1, q2) = bitile_children(&q);
        assert_eq!(q1.freq(), DyadicInterval::new(-1, 0));
        assert_eq!(q2.freq(), DyadicInterval::new(-1, 1));
        assert_eq!(q1.time(), DyadicInterval::new(1, 0));
    }

    #[test]
    fn children_have_area_one() {
        for p in grid_bitiles(&Grid::new(3, 3)) {
            let (a, b) = p.children();
            for t in [a, b] {
                assert_eq!(t.time().scale + t.freq().scale, 0);
            }
            assert!(p.freq().contains(&a.freq()) && p.freq().contains(&b.freq()));
            assert!(a.freq().is_disjoint(&b.freq()));
            assert_eq!(a.freq().index + 1, b.freq().index);
        }
    }

    #[test]
    fn area_checked() {
        assert!(Tile::new(DyadicInterval::new(1, 0), DyadicInterval::new(0, 0)).is_err());
        assert!(Bitile::new(DyadicInterval::new(1, 0), DyadicInterval::new(-1, 0)).is_err());
    }

    #[test]
    fn order_examples() {
        let p = Tile::from_indices(0, 0, 0);
        let q = Tile::from_indices(1, 0, 0); // [0,2) x [0,1/2)
        assert!(tile_le(&p, &p));
        assert!(tile_le(&p, &q));
        assert!(!tile_le(&q, &p));
        let r = Tile::from_indices(0, 1, 0);
        assert!(!tile_le(&p, &r));
    }

    #[test]
    fn order_is_a_partial_order_on_grid_tiles() {
        let tiles = grid_tiles(&Grid::new(2, 1));
        for a in &tiles {
            assert!(tile_le(a, a));
            for b in &tiles {
                if tile_le(a, b) && tile_le(b, a) {
                    assert_eq!(a, b);
                }
                for c in &tiles {
                    if tile_le(a, b) && tile_le(b, c) {
                        assert!(tile_le(a, c));
                    }
                }
            }
        }
    }

    #[test]
    fn bitile_lines_round_trip() {
        let all = grid_bitiles(&Grid::new(2, 2));
        assert_eq!(all.len(), 4 * 8);
        let text = write_bitiles(&all);
        assert_eq!(parse_bitiles(&text).unwrap(), all);
        assert_eq!(text.lines().next().unwrap(), "-1 0 2 0");
        assert!(parse_bitiles("1 2 3").is_err());
    }
}
