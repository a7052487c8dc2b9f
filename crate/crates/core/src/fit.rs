//! Least-squares power-law fits in log-log coordinates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum number of points in a reported fit.
pub const MIN_SAMPLES: usize = 4;

/// `y ≈ exp(intercept) · x^slope`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub samples: usize,
    /// Largest absolute residual in natural-log units.
    pub max_residual: f64,
}

impl FitResult {
    pub fn predict(&self, x: f64) -> f64 {
        (self.intercept + self.slope * x.ln()).exp()
    }
}

/// Fits `log y = a + b log x` by least squares. Needs at least four points
/// whose abscissae span half a decade; every coordinate must be positive.
pub fn fit_power_law(pairs: &[(f64, f64)]) -> Result<FitResult> {
    if pairs.len() < MIN_SAMPLES {
        return Err(Error::Fit(format!("need at least {MIN_SAMPLES} points, got {}", pairs.len())));
    }
    if let Some((x, y)) = pairs.iter().find(|(x, y)| !(*x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())) {
        return Err(Error::Fit(format!("power-law fit needs positive finite data, got ({x}, {y})")));
    }
    let lo = pairs.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi = pairs.iter().map(|p| p.0).fold(0.0, f64::max);
    if (hi / lo).log10() < 0.5 - 1e-12 {
        return Err(Error::Fit(format!("abscissae span only {:.3} decades", (hi / lo).log10())));
    }
    Ok(regress(pairs))
}

/// Unchecked log-log regression; callers guarantee positive data.
pub(crate) fn regress(pairs: &[(f64, f64)]) -> FitResult {
    let n = pairs.len() as f64;
    let u: Vec<f64> = pairs.iter().map(|p| p.0.ln()).collect();
    let v: Vec<f64> = pairs.iter().map(|p| p.1.ln()).collect();
    let ub = u.iter().sum::<f64>() / n;
    let vb = v.iter().sum::<f64>() / n;
    let suu: f64 = u.iter().map(|a| (a - ub).powi(2)).sum();
    let suv: f64 = u.iter().zip(&v).map(|(a, b)| (a - ub) * (b - vb)).sum();
    let svv: f64 = v.iter().map(|b| (b - vb).powi(2)).sum();
    let slope = if suu > 0.0 { suv / suu } else { 0.0 };
    let intercept = vb - slope * ub;
    let residuals: Vec<f64> = u.iter().zip(&v).map(|(a, b)| b - intercept - slope * a).collect();
    let ssr: f64 = residuals.iter().map(|r| r * r).sum();
    let r_squared = if svv > 0.0 { 1.0 - ssr / svv } else { 1.0 };
    FitResult {
        slope,
        intercept,
        r_squared,
        samples: pairs.len(),
        max_residual: residuals.iter().map(|r| r.abs()).fold(0.0, f64::max),
    }
}
