use std::fmt;

use super::{tile_le, Bitile, Rect};
use crate::dyadic::{DyadicInterval, DyadicPoint, Grid};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TreeKind {
    General,
    One,
    Two,
}

impl TreeKind {
    /// Whether `p` may belong to a tree of this kind with the given top.
    pub fn admits(self, top_time: &DyadicInterval, top_freq: &DyadicPoint, p: &Bitile) -> bool {
        if !top_time.contains(&p.time()) {
            return false;
        }
        match self {
            TreeKind::General => p.freq().contains_point(top_freq),
            TreeKind::One => p.freq_lower().contains_point(top_freq),
            TreeKind::Two => p.freq_upper().contains_point(top_freq),
        }
    }

    fn label(self) -> &'static str {
        match self {
            TreeKind::General => "tree",
            TreeKind::One => "1-tree",
            TreeKind::Two => "2-tree",
        }
    }

    fn from_label(s: &str) -> Result<Self> {
        match s {
            "tree" => Ok(TreeKind::General),
            "1-tree" => Ok(TreeKind::One),
            "2-tree" => Ok(TreeKind::Two),
            _ => Err(Error::Parse(format!("unknown tree kind {s:?}"))),
        }
    }
}

/// Bitiles pointing at a common top `(I_T, ξ_T)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tree {
    top_time: DyadicInterval,
    top_freq: DyadicPoint,
    bitiles: Vec<Bitile>,
    kind: TreeKind,
}

impl Tree {
    pub fn new(
        top_time: DyadicInterval,
        top_freq: DyadicPoint,
        bitiles: Vec<Bitile>,
        kind: TreeKind,
    ) -> Result<Self> {
        if let Some(p) = bitiles
            .iter()
            .find(|p| !kind.admits(&top_time, &top_freq, p))
        {
            return Err(Error::PreconditionViolated(format!(
                "bitile {p} does not belong to a {} with top {top_time:?}, {top_freq}",
                kind.label()
            )));
        }
        Ok(Self {
            top_time,
            top_freq,
            bitiles,
            kind,
        })
    }

    /// `{P ∈ S : I_P ⊆ I, ξ ∈ ω_P}` (or the `ω_{P,i}` variant for i-trees).
    pub fn maximal(
        top_time: DyadicInterval,
        top_freq: DyadicPoint,
        pool: &[Bitile],
        kind: TreeKind,
    ) -> Self {
        let bitiles = pool
            .iter()
            .filter(|p| kind.admits(&top_time, &top_freq, p))
            .copied()
            .collect();
        Self {
            top_time,
            top_freq,
            bitiles,
            kind,
        }
    }

    pub fn top_time(&self) -> DyadicInterval {
        self.top_time
    }

    pub fn top_freq(&self) -> &DyadicPoint {
        &self.top_freq
    }

    pub fn bitiles(&self) -> &[Bitile] {
        &self.bitiles
    }

    pub fn kind(&self) -> TreeKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.bitiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bitiles.is_empty()
    }

    /// True when every member has `ξ_T ∈ ω_{P,2}`, whatever the tag.
    pub fn is_two_tree(&self) -> bool {
        self.bitiles
            .iter()
            .all(|p| TreeKind::Two.admits(&self.top_time, &self.top_freq, p))
    }

    pub fn is_one_tree(&self) -> bool {
        self.bitiles
            .iter()
            .all(|p| TreeKind::One.admits(&self.top_time, &self.top_freq, p))
    }

    /// Retags the tree as a 2-tree after checking membership.
    pub fn into_two_tree(self) -> Result<Self> {
        if self.is_two_tree() {
            Ok(Self {
                kind: TreeKind::Two,
                ..self
            })
        } else {
            Err(Error::NotATwoTree)
        }
    }

    /// The smallest top tile `[I_T] × [ξ_T]` at the grid's frequency
    /// resolution dominates every member in the tile order.
    pub fn top_dominates(&self, grid: &Grid) -> bool {
        let scale = -self.top_time.scale;
        if scale < -(grid.j as i32) {
            return false;
        }
        let top = TopRect {
            time: self.top_time,
            freq: DyadicInterval::new(scale, self.top_freq.floor_index(scale)),
        };
        self.bitiles.iter().all(|p| tile_le(p, &top))
    }
}

struct TopRect {
    time: DyadicInterval,
    freq: DyadicInterval,
}

impl Rect for TopRect {
    fn time(&self) -> DyadicInterval {
        self.time
    }
    fn freq(&self) -> DyadicInterval {
        self.freq
    }
}

/// An ordered, possibly overlapping, list of trees.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Forest {
    pub trees: Vec<Tree>,
}

impl Forest {
    pub fn new(trees: Vec<Tree>) -> Self {
        Self { trees }
    }

    pub fn len(&self) -> usize {
        self.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Tree> {
        self.trees.iter()
    }

    /// All member bitiles, with repetition if trees overlap.
    pub fn bitiles(&self) -> impl Iterator<Item = &Bitile> {
        self.trees.iter().flat_map(|t| t.bitiles.iter())
    }

    /// `Σ_T |I_T|`.
    pub fn top_measure(&self) -> f64 {
        self.trees.iter().map(|t| t.top_time.length()).sum()
    }

    /// Parses the text written by the `Display` impl.
    pub fn parse(text: &str) -> Result<Self> {
        let mut trees: Vec<Tree> = Vec::new();
        for line in text.lines().map(str::trim) {
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("top:") {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                if parts.len() != 5 {
                    return Err(Error::Parse(format!("bad tree header {line:?}")));
                }
                let num = |s: &str| -> Result<u64> {
                    s.parse()
                        .map_err(|_| Error::Parse(format!("bad number {s:?}")))
                };
                let scale: i32 = parts[0]
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad scale {:?}", parts[0])))?;
                let den = num(parts[3])?;
                if !den.is_power_of_two() {
                    return Err(Error::Parse(format!("denominator {den} is not a power of two")));
                }
                let xi = DyadicPoint::from_scaled(num(parts[2])?, -(den.trailing_zeros() as i32));
                trees.push(Tree {
                    top_time: DyadicInterval::new(scale, num(parts[1])?),
                    top_freq: xi,
                    bitiles: Vec::new(),
                    kind: TreeKind::from_label(parts[4])?,
                });
            } else {
                let tree = trees
                    .last_mut()
                    .ok_or_else(|| Error::Parse("bitile line before any tree header".into()))?;
                tree.bitiles.push(line.parse()?);
            }
        }
        for t in &trees {
            Tree::new(t.top_time, t.top_freq.clone(), t.bitiles.clone(), t.kind)?;
        }
        Ok(Self { trees })
    }
}

impl fmt::Display for Forest {
    /// `top: i m ξ_num ξ_den kind` followed by one bitile per line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.trees {
            let e = t.top_freq.min_digit().map_or(0, |d| (-d).max(0));
            let num = t.top_freq.shift(e).floor_index(0);
            writeln!(
                f,
                "top: {} {} {} {} {}",
                t.top_time.scale,
                t.top_time.index,
                num,
                1u64 << e,
                t.kind.label()
            )?;
            for p in &t.bitiles {
                writeln!(f, "{p}")?;
            }
        }
        Ok(())
    }
}

/// `Σ_{T ∈ F} 1_{I_T}(x)`, with multiplicity.
pub fn counting_function(forest: &Forest, x: &DyadicPoint) -> usize {
    forest
        .trees
        .iter()
        .filter(|t| t.top_time.contains_point(x))
        .count()
}

/// [`counting_function`] at the left endpoint of each grid cell.
pub fn counting_on_grid(forest: &Forest, grid: &Grid) -> Vec<usize> {
    let mut count = vec![0usize; grid.cells()];
    for t in &forest.trees {
        if let Some(r) = grid.cell_range(&t.top_time) {
            count[r].iter_mut().for_each(|c| *c += 1);
        }
    }
    count
}
