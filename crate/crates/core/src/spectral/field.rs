use num_complex::Complex64;

use super::Grid;
use crate::error::{Error, Result};

/// Complex samples on a periodic grid. Immutable once built; all samples
/// are finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    values: Vec<Complex64>,
}

impl Field {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::SizeMismatch { expected: grid.len(), got: values.len() });
        }
        if let Some(i) = values.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(crate::error::invalid(format!("field sample {i} is not finite")));
        }
        Ok(Self { grid, values })
    }

    /// Skips the finiteness scan; for values produced by finite arithmetic
    /// on finite inputs.
    pub(crate) fn from_parts(grid: Grid, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn zeros(grid: Grid) -> Self {
        Self { grid, values: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    /// Samples `f` at every grid point. The closure sees the coordinate
    /// vector of length `d`.
    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> Complex64) -> Self {
        let xs = grid.coords();
        let values = match grid.dim() {
            1 => xs.iter().map(|&x| f(&[x])).collect(),
            _ => {
                let mut v = Vec::with_capacity(grid.len());
                for &x0 in &xs {
                    for &x1 in &xs {
                        v.push(f(&[x0, x1]));
                    }
                }
                v
            }
        };
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn scale(&self, c: f64) -> Field {
        Field::from_parts(self.grid, self.values.iter().map(|z| z * c).collect())
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Field {
        Field::from_parts(self.grid, self.values.iter().map(|&z| f(z)).collect())
    }

    fn check_same_grid(&self, other: &Field) -> Result<()> {
        if self.grid != other.grid {
            return Err(crate::error::invalid("fields live on different grids"));
        }
        Ok(())
    }

    pub fn add(&self, other: &Field) -> Result<Field> {
        self.check_same_grid(other)?;
        Ok(Field::from_parts(
            self.grid,
            self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        ))
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.check_same_grid(other)?;
        Ok(Field::from_parts(
            self.grid,
            self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
        ))
    }

    /// `a·self + b·other` for complex `a`, `b`.
    pub fn combine(&self, a: Complex64, other: &Field, b: Complex64) -> Result<Field> {
        self.check_same_grid(other)?;
        Ok(Field::from_parts(
            self.grid,
            self.values.iter().zip(&other.values).map(|(x, y)| a * x + b * y).collect(),
        ))
    }

    /// `L²` inner product `∫ f ḡ dx`.
    pub fn inner(&self, other: &Field) -> Result<Complex64> {
        self.check_same_grid(other)?;
        let s: Complex64 = self.values.iter().zip(&other.values).map(|(a, b)| a * b.conj()).sum();
        Ok(s * self.grid.cell_volume())
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }
}
