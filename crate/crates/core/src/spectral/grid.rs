use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{invalid, precondition, Result};

/// Largest number of points per axis the automatic sizing will pick.
pub const MAX_POINTS_1D: usize = 1 << 16;
pub const MAX_POINTS_2D: usize = 1 << 10;

/// Uniform periodic grid on `[-L/2, L/2)^d`, `n` points per axis.
///
/// Sample `j` along an axis sits at `x_j = (j - n/2) h`, so the origin is a
/// grid point. Wavenumbers follow FFT ordering:
/// `k_m = 2π m / L` for `m < n/2`, `2π (m - n) / L` otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    d: u32,
    n: usize,
    length: f64,
}

impl Grid {
    pub fn new(d: u32, n: usize, length: f64) -> Result<Self> {
        if !(d == 1 || d == 2) {
            return Err(invalid(format!("only d = 1 or 2 is supported numerically, got d = {d}")));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(invalid(format!("points per axis must be a power of two >= 8, got {n}")));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(invalid(format!("side length must be positive, got {length}")));
        }
        Ok(Self { d, n, length })
    }

    pub fn dim(&self) -> u32 {
        self.d
    }

    pub fn points_per_axis(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Total number of samples, `n^d`.
    pub fn len(&self) -> usize {
        self.n.pow(self.d)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Rectangle-rule weight `h^d`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.d as i32)
    }

    /// Coordinate of index `j` along one axis.
    pub fn coord(&self, j: usize) -> f64 {
        (j as f64 - (self.n / 2) as f64) * self.spacing()
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.coord(j)).collect()
    }

    /// Wavenumber of FFT index `m` along one axis.
    pub fn wavenumber(&self, m: usize) -> f64 {
        let m = if m < self.n / 2 { m as f64 } else { m as f64 - self.n as f64 };
        2.0 * PI * m / self.length
    }

    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.n).map(|m| self.wavenumber(m)).collect()
    }

    /// Nyquist wavenumber `π/h`.
    pub fn k_max(&self) -> f64 {
        PI / self.spacing()
    }

    /// `|x|²` at every sample, row-major.
    pub fn radius_sq(&self) -> Vec<f64> {
        let xs = self.coords();
        match self.d {
            1 => xs.iter().map(|x| x * x).collect(),
            _ => {
                let mut out = Vec::with_capacity(self.len());
                for &x0 in &xs {
                    for &x1 in &xs {
                        out.push(x0 * x0 + x1 * x1);
                    }
                }
                out
            }
        }
    }

    /// `|k|²` at every Fourier index, row-major.
    pub fn wavenumber_sq(&self) -> Vec<f64> {
        let ks = self.wavenumbers();
        match self.d {
            1 => ks.iter().map(|k| k * k).collect(),
            _ => {
                let mut out = Vec::with_capacity(self.len());
                for &k0 in &ks {
                    for &k1 in &ks {
                        out.push(k0 * k0 + k1 * k1);
                    }
                }
                out
            }
        }
    }

    /// Sizes a grid for data with support radius `support` and spectral
    /// radius `k_resolve` (both at round-off level), evolved freely up to
    /// `horizon` with the fastest relevant wavenumber `k_travel`.
    ///
    /// The box satisfies `L >= 2 R + 4 k_travel T` and the spacing resolves
    /// `k_resolve`.
    pub fn sized_for(
        d: u32,
        support: f64,
        k_resolve: f64,
        k_travel: f64,
        horizon: f64,
    ) -> Result<Self> {
        if !(support > 0.0 && k_resolve > 0.0 && k_travel >= 0.0 && horizon >= 0.0) {
            return Err(invalid("grid sizing needs positive support and spectral radii"));
        }
        let length = 2.0 * support + 4.0 * k_travel * horizon;
        let h_max = PI / k_resolve;
        let n = ((length / h_max).ceil() as usize).next_power_of_two().max(8);
        let cap = if d == 1 { MAX_POINTS_1D } else { MAX_POINTS_2D };
        if n > cap {
            return Err(precondition(format!(
                "automatic grid needs {n} points per axis (cap {cap}); reduce the horizon or scale"
            )));
        }
        Grid::new(d, n, length)
    }
}
