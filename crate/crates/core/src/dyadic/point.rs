use std::collections::BTreeSet;
use std::fmt;
use std::ops::BitXor;

/// A nonnegative dyadic rational stored exactly as the set of positions `n`
/// with binary digit `a_n = 1`, so that the value is `sum 2^n`.
///
/// Only terminating expansions are representable, which fixes the choice of
/// expansion for dyadic rationals.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct DyadicPoint {
    digits: BTreeSet<i32>,
}

impl DyadicPoint {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_digits([0])
    }

    /// Builds a point from digit positions. Repeated positions cancel in pairs,
    /// matching addition modulo two.
    pub fn from_digits<I: IntoIterator<Item = i32>>(positions: I) -> Self {
        let mut digits = BTreeSet::new();
        for n in positions {
            if !digits.remove(&n) {
                digits.insert(n);
            }
        }
        Self { digits }
    }

    pub fn from_integer(value: u64) -> Self {
        Self::from_scaled(value, 0)
    }

    /// The point `mantissa * 2^exponent`.
    pub fn from_scaled(mantissa: u64, exponent: i32) -> Self {
        let digits = (0..64)
            .filter(|b| mantissa >> b & 1 == 1)
            .map(|b| b + exponent)
            .collect();
        Self { digits }
    }

    /// Exact conversion of a finite nonnegative double.
    pub fn from_f64(value: f64) -> Option<Self> {
        if !value.is_finite() || value < 0.0 {
            return None;
        }
        if value == 0.0 {
            return Some(Self::zero());
        }
        let bits = value.to_bits();
        let raw_exp = ((bits >> 52) & 0x7ff) as i32;
        let frac = bits & ((1u64 << 52) - 1);
        let (mantissa, exponent) = if raw_exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), raw_exp - 1075)
        };
        Some(Self::from_scaled(mantissa, exponent))
    }

    pub fn to_f64(&self) -> f64 {
        self.digits.iter().map(|&n| 2f64.powi(n)).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn digit(&self, n: i32) -> bool {
        self.digits.contains(&n)
    }

    pub fn digits(&self) -> impl Iterator<Item = i32> + '_ {
        self.digits.iter().copied()
    }

    pub fn max_digit(&self) -> Option<i32> {
        self.digits.iter().next_back().copied()
    }

    pub fn min_digit(&self) -> Option<i32> {
        self.digits.iter().next().copied()
    }

    /// Digitwise addition modulo two.
    pub fn xor_add(&self, other: &Self) -> Self {
        Self {
            digits: self
                .digits
                .symmetric_difference(&other.digits)
                .copied()
                .collect(),
        }
    }

    /// Product of the digit sequences as GF(2) polynomials.
    pub fn carryless_mul(&self, other: &Self) -> Self {
        let mut digits = BTreeSet::new();
        for &m in &self.digits {
            for &n in &other.digits {
                let p = m + n;
                if !digits.remove(&p) {
                    digits.insert(p);
                }
            }
        }
        Self { digits }
    }

    /// `+1` when `a_{-1} = 0`, `-1` when `a_{-1} = 1`.
    pub fn sign_e(&self) -> i8 {
        if self.digit(-1) {
            -1
        } else {
            1
        }
    }

    /// Multiplication by `2^k`.
    pub fn shift(&self, k: i32) -> Self {
        Self {
            digits: self.digits.iter().map(|&n| n + k).collect(),
        }
    }

    /// Index `m` of the dyadic interval `[2^i m, 2^i (m+1))` containing the
    /// point.
    ///
    /// Panics if the index does not fit in 64 bits.
    pub fn floor_index(&self, scale: i32) -> u64 {
        let mut m = 0u64;
        for &n in self.digits.range(scale..) {
            let b = n - scale;
            assert!(b < 64, "dyadic index overflows u64 at scale {scale}");
            m |= 1 << b;
        }
        m
    }

    /// True if every digit lies strictly below position `n`, i.e. the point
    /// is in `[0, 2^n)`.
    pub fn below_pow2(&self, n: i32) -> bool {
        self.max_digit().is_none_or(|d| d < n)
    }
}

/// `e(x ⊗ ξ)`, the Walsh character: `(-1)^{#{m : a_m(x) = a_{-1-m}(ξ) = 1}}`.
///
/// Symmetric in its arguments.
pub fn character(x: &DyadicPoint, xi: &DyadicPoint) -> i8 {
    let (small, large) = if x.digits.len() <= xi.digits.len() {
        (x, xi)
    } else {
        (xi, x)
    };
    let hits = small
        .digits
        .iter()
        .filter(|&&m| large.digit(-1 - m))
        .count();
    if hits % 2 == 0 {
        1
    } else {
        -1
    }
}

/// The Walsh function `W_l(x)` evaluated through its dilation recursion.
///
/// Supported on `[0, 1)` with values in `{-1, 0, 1}`.
pub fn walsh_function(l: u64, x: &DyadicPoint) -> f64 {
    if !x.below_pow2(0) {
        return 0.0;
    }
    let mut l = l;
    let mut y = x.clone();
    let mut sign = 1.0;
    while l != 0 {
        let upper = y.digit(-1);
        if upper && l & 1 == 1 {
            sign = -sign;
        }
        // 2y or 2y - 1
        let mut next = y.shift(1);
        if upper {
            next.digits.remove(&0);
        }
        y = next;
        l >>= 1;
    }
    sign
}

impl BitXor for &DyadicPoint {
    type Output = DyadicPoint;

    fn bitxor(self, rhs: Self) -> DyadicPoint {
        self.xor_add(rhs)
    }
}

impl fmt::Debug for DyadicPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DyadicPoint({})", self)
    }
}

impl fmt::Display for DyadicPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Some(hi) = self.max_digit() else {
            return write!(f, "0");
        };
        let lo = self.min_digit().unwrap();
        for n in (0.max(lo)..=hi.max(0)).rev() {
            write!(f, "{}", u8::from(self.digit(n)))?;
        }
        if lo < 0 {
            write!(f, ".")?;
            for n in (lo..0).rev() {
                write!(f, "{}", u8::from(self.digit(n)))?;
            }
        }
        Ok(())
    }
}
