use super::DyadicPoint;

/// The dyadic interval `[2^scale * index, 2^scale * (index + 1))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicInterval {
    pub scale: i32,
    pub index: u64,
}

impl DyadicInterval {
    pub const fn new(scale: i32, index: u64) -> Self {
        Self { scale, index }
    }

    pub fn length(&self) -> f64 {
        2f64.powi(self.scale)
    }

    pub fn left(&self) -> DyadicPoint {
        DyadicPoint::from_scaled(self.index, self.scale)
    }

    pub fn left_f64(&self) -> f64 {
        self.index as f64 * self.length()
    }

    pub fn parent(&self) -> Self {
        Self::new(self.scale + 1, self.index >> 1)
    }

    /// Left and right halves.
    pub fn children(&self) -> (Self, Self) {
        let s = self.scale - 1;
        (Self::new(s, self.index << 1), Self::new(s, (self.index << 1) | 1))
    }

    /// The ancestor at a coarser or equal scale.
    pub fn ancestor(&self, scale: i32) -> Self {
        debug_assert!(scale >= self.scale);
        let d = (scale - self.scale) as u32;
        Self::new(scale, if d >= 64 { 0 } else { self.index >> d })
    }

    /// `other ⊆ self`.
    pub fn contains(&self, other: &Self) -> bool {
        other.scale <= self.scale && other.ancestor(self.scale) == *self
    }

    pub fn contains_point(&self, x: &DyadicPoint) -> bool {
        x.floor_index(self.scale) == self.index
    }

    pub fn intersects(&self, other: &Self) -> bool {
        self.contains(other) || other.contains(self)
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        !self.intersects(other)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn containment_and_family() {
        let i = DyadicInterval::new(1, 3); // [6, 8)
        let (a, b) = i.children();
        assert_eq!(a, DyadicInterval::new(0, 6));
        assert_eq!(b.parent(), i);
        assert!(i.contains(&a) && i.contains(&i));
        assert!(!a.contains(&i));
        assert!(a.is_disjoint(&b));
        assert!(i.contains(&DyadicInterval::new(-3, 56)));
        assert!(!i.contains(&DyadicInterval::new(-3, 64)));
        assert!(i.contains_point(&DyadicPoint::from_f64(7.5).unwrap()));
        assert!(!i.contains_point(&DyadicPoint::from_f64(8.0).unwrap()));
        assert_eq!(i.left().to_f64(), 6.0);
    }
}
