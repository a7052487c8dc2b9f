use num_complex::Complex64;
use serde::Serialize;

use super::fourier::{dft_raw, Direction};
use super::{Field, Grid};

/// Energy fraction used for the effective support and spectral radius in
/// the wrap-around rule.
pub const WRAP_ENERGY_FRACTION: f64 = 0.9999;

/// Exact free flow `e^{itΔ}` on a grid: the Fourier multiplier `e^{-i|k|²t}`.
#[derive(Debug, Clone)]
pub struct FreeFlow {
    grid: Grid,
    k2: Vec<f64>,
}

impl FreeFlow {
    pub fn new(grid: Grid) -> Self {
        Self { grid, k2: grid.wavenumber_sq() }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn wavenumber_sq(&self) -> &[f64] {
        &self.k2
    }

    /// Multiplies Fourier coefficients by `e^{-i|k|²t}`.
    pub fn apply_in_fourier(&self, hat: &mut [Complex64], t: f64) {
        if t == 0.0 {
            return;
        }
        for (z, &k2) in hat.iter_mut().zip(&self.k2) {
            *z *= Complex64::cis(-k2 * t);
        }
    }

    /// `e^{itΔ}` on physical samples, in place.
    pub fn propagate_in_place(&self, values: &mut [Complex64], t: f64) {
        if t == 0.0 {
            return;
        }
        dft_raw(&self.grid, values, Direction::Forward);
        let s = 1.0 / self.grid.len() as f64;
        for (z, &k2) in values.iter_mut().zip(&self.k2) {
            *z *= Complex64::cis(-k2 * t) * s;
        }
        dft_raw(&self.grid, values, Direction::Inverse);
    }

    pub fn propagate(&self, f: &Field, t: f64) -> Field {
        let mut v = f.values().to_vec();
        self.propagate_in_place(&mut v, t);
        Field::from_parts(self.grid, v)
    }
}

/// Outcome of the wrap-around rule `L ≥ 2R + 4 k T`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct WrapCheck {
    pub support_radius: f64,
    pub spectral_radius: f64,
    pub required_length: f64,
    pub length: f64,
    pub ok: bool,
}

fn radius_holding(weights: &[f64], radii: &[f64], fraction: f64) -> f64 {
    let total: f64 = weights.iter().sum();
    if total == 0.0 {
        return 0.0;
    }
    let mut idx: Vec<usize> = (0..radii.len()).collect();
    idx.sort_by(|&a, &b| radii[a].total_cmp(&radii[b]));
    let mut acc = 0.0;
    for i in idx {
        acc += weights[i];
        if acc >= fraction * total {
            return radii[i];
        }
    }
    radii.iter().cloned().fold(0.0, f64::max)
}

/// Applies the wrap-around rule to `f` evolved up to `|t|`, using radii
/// that hold 99.99% of the mass in physical and Fourier space.
pub fn wrap_check(f: &Field, t: f64) -> WrapCheck {
    let g = f.grid();
    let w: Vec<f64> = f.values().iter().map(|z| z.norm_sqr()).collect();
    let r: Vec<f64> = g.radius_sq().iter().map(|v| v.sqrt()).collect();
    let support = radius_holding(&w, &r, WRAP_ENERGY_FRACTION);
    let mut hat = f.values().to_vec();
    dft_raw(g, &mut hat, Direction::Forward);
    let wk: Vec<f64> = hat.iter().map(|z| z.norm_sqr()).collect();
    let k: Vec<f64> = g.wavenumber_sq().iter().map(|v| v.sqrt()).collect();
    let kr = radius_holding(&wk, &k, WRAP_ENERGY_FRACTION);
    let required = 2.0 * support + 4.0 * kr * t.abs();
    WrapCheck {
        support_radius: support,
        spectral_radius: kr,
        required_length: required,
        length: g.length(),
        ok: g.length() >= required,
    }
}

/// `e^{itΔ} f`. Logs a warning when the box is too small for `t` under the
/// wrap-around rule.
pub fn free_propagate(f: &Field, t: f64) -> Field {
    let check = wrap_check(f, t);
    if !check.ok {
        log::warn!(
            "free propagation to t = {t} may wrap around: box {} < required {:.3}",
            check.length,
            check.required_length
        );
    }
    FreeFlow::new(*f.grid()).propagate(f, t)
}
