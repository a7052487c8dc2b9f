use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::norms::mass;
use super::{Field, Grid};
use crate::error::{invalid, Result};

/// Smooth, rapidly decaying radial profiles in `Σ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "lowercase")]
pub enum Profile {
    /// `exp(-|x|²/(2w²))`
    Gaussian { width: f64 },
    /// `sech(|x|/w)`
    Sech { width: f64 },
}

impl Default for Profile {
    fn default() -> Self {
        Profile::Gaussian { width: 1.0 }
    }
}

impl Profile {
    pub fn width(&self) -> f64 {
        match *self {
            Profile::Gaussian { width } | Profile::Sech { width } => width,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let w = self.width();
        if !(w.is_finite() && w > 0.0) {
            return Err(invalid(format!("profile width must be positive, got {w}")));
        }
        Ok(())
    }

    pub fn eval(&self, r: f64) -> f64 {
        match *self {
            Profile::Gaussian { width } => (-0.5 * (r / width).powi(2)).exp(),
            Profile::Sech { width } => 1.0 / (r / width).cosh(),
        }
    }

    /// Radius beyond which the profile is below double round-off.
    pub fn support_radius(&self) -> f64 {
        match *self {
            Profile::Gaussian { width } => 8.6 * width,
            Profile::Sech { width } => 37.5 * width,
        }
    }

    /// Wavenumber beyond which the spectrum is below double round-off.
    pub fn spectral_radius(&self) -> f64 {
        match *self {
            Profile::Gaussian { width } => 8.6 / width,
            Profile::Sech { width } => 23.5 / width,
        }
    }

    /// Wavenumber above which only a `1e-12` energy fraction remains; sets
    /// the transport speed used to size boxes for long free evolutions.
    pub fn travel_wavenumber(&self) -> f64 {
        match *self {
            Profile::Gaussian { width } => 5.3 / width,
            Profile::Sech { width } => 8.8 / width,
        }
    }

    /// Samples `amplitude · σ^{-d/2} φ(x/σ)` directly.
    pub fn sample(&self, grid: Grid, amplitude: f64, sigma: f64) -> Field {
        let c = amplitude * sigma.powf(-(grid.dim() as f64) / 2.0);
        Field::from_fn(grid, |x| {
            let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            Complex64::new(c * self.eval(r / sigma), 0.0)
        })
    }

    /// Profile rescaled to unit discrete mass.
    pub fn unit_mass(&self, grid: Grid) -> Field {
        let f = self.sample(grid, 1.0, 1.0);
        f.scale(1.0 / mass(&f).sqrt())
    }

    /// Grid that holds `φ(·/σ)` at round-off and keeps its free evolution
    /// clear of wrap-around up to `horizon`.
    pub fn grid_for(&self, d: u32, sigma: f64, horizon: f64) -> Result<Grid> {
        self.validate()?;
        if !(sigma > 0.0) {
            return Err(invalid(format!("scale must be positive, got {sigma}")));
        }
        Grid::sized_for(
            d,
            sigma * self.support_radius(),
            self.spectral_radius() / sigma,
            self.travel_wavenumber() / sigma,
            horizon,
        )
    }
}
