use super::{DyadicInterval, Grid};
use crate::error::{Error, Result};

/// A step function on a [`Grid`] with values in `R^dim`.
///
/// Values are stored cell-major: component `a` of cell `c` is
/// `values[c * dim + a]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    grid: Grid,
    dim: usize,
    values: Vec<f64>,
}

impl StepFunction {
    pub fn new(grid: Grid, dim: usize, values: Vec<f64>) -> Result<Self> {
        let expected = grid.cells() * dim;
        if dim == 0 || values.len() != expected {
            return Err(Error::MismatchedGrid {
                expected,
                found: values.len(),
            });
        }
        Ok(Self { grid, dim, values })
    }

    pub fn scalar(grid: Grid, values: Vec<f64>) -> Result<Self> {
        Self::new(grid, 1, values)
    }

    pub fn zeros(grid: Grid, dim: usize) -> Self {
        Self {
            grid,
            dim,
            values: vec![0.0; grid.cells() * dim],
        }
    }

    pub fn constant(grid: Grid, value: f64) -> Self {
        Self {
            grid,
            dim: 1,
            values: vec![value; grid.cells()],
        }
    }

    /// The indicator of a dyadic interval (clipped to the grid domain).
    pub fn indicator(grid: Grid, iv: &DyadicInterval) -> Result<Self> {
        let range = grid.cell_range(iv).ok_or(Error::OutsideGrid {
            time: *iv,
            freq: *iv,
        })?;
        let mut f = Self::zeros(grid, 1);
        f.values[range].fill(1.0);
        Ok(f)
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn is_scalar(&self) -> bool {
        self.dim == 1
    }

    pub fn require_scalar(&self) -> Result<&[f64]> {
        if self.dim == 1 {
            Ok(&self.values)
        } else {
            Err(Error::NotScalar(self.dim))
        }
    }

    pub fn cell(&self, c: usize) -> &[f64] {
        &self.values[c * self.dim..(c + 1) * self.dim]
    }

    /// `|f(x)|_H` on each cell.
    pub fn pointwise_norm(&self) -> Vec<f64> {
        self.values
            .chunks_exact(self.dim)
            .map(|v| v.iter().map(|a| a * a).sum::<f64>().sqrt())
            .collect()
    }

    pub fn lp_norm(&self, p: f64) -> f64 {
        let w = self.grid.cell_width();
        if p.is_infinite() {
            return self.pointwise_norm().into_iter().fold(0.0, f64::max);
        }
        let s: f64 = self.pointwise_norm().iter().map(|a| a.powf(p)).sum();
        (w * s).powf(1.0 / p)
    }

    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.values.iter().map(|a| a * a).sum();
        (self.grid.cell_width() * s).sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.lp_norm(f64::INFINITY)
    }

    /// `∫ <f, g>_H dx`.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        self.check_same(other)?;
        let s: f64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .sum();
        Ok(s * self.grid.cell_width())
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            grid: self.grid,
            dim: self.dim,
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            grid: self.grid,
            dim: self.dim,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    /// Pointwise product of a scalar function with this one.
    pub fn modulate(&self, weights: &[f64]) -> Result<Self> {
        if weights.len() != self.grid.cells() {
            return Err(Error::MismatchedGrid {
                expected: self.grid.cells(),
                found: weights.len(),
            });
        }
        let mut out = self.clone();
        for (chunk, w) in out.values.chunks_exact_mut(self.dim).zip(weights) {
            chunk.iter_mut().for_each(|v| *v *= w);
        }
        Ok(out)
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::MismatchedGrid {
                expected: self.grid.cells(),
                found: other.grid.cells(),
            });
        }
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norms_use_cell_width() {
        let g = Grid::new(1, 1);
        let f = StepFunction::scalar(g, vec![1.0, 1.0, 0.0, 0.0]).unwrap();
        assert_eq!(f.l2_norm(), 1.0);
        assert_eq!(f.lp_norm(1.0), 1.0);
        let h = StepFunction::new(g, 2, vec![3.0, 4.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(h.pointwise_norm()[0], 5.0);
        assert!((h.l2_norm() - (12.5f64).sqrt()).abs() < 1e-15);
        assert!(StepFunction::scalar(g, vec![0.0; 3]).is_err());
    }
}
