use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

use super::fourier::{dft_raw, Direction};
use super::{Field, Grid};
use crate::error::{invalid, precondition, Result};

/// Relative amplitude below which samples and modes count as empty when
/// checking that a rescaled field still fits the grid.
const NEGLIGIBLE: f64 = 1e-13;

/// `φ_{ε,σ}(x) = ε σ^{-d/2} φ(x/σ)`, resampled on the same grid by
/// trigonometric interpolation.
pub fn scale_family(f: &Field, eps: f64, sigma: f64) -> Result<Field> {
    if !(eps.is_finite() && eps > 0.0 && sigma.is_finite() && sigma > 0.0) {
        return Err(invalid(format!("scale family needs ε, σ > 0, got ({eps}, {sigma})")));
    }
    let grid = *f.grid();
    let amp = eps * sigma.powf(-(grid.dim() as f64) / 2.0);
    if sigma == 1.0 {
        return Ok(f.scale(amp));
    }
    let peak = f.values().iter().map(|z| z.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return Ok(f.clone());
    }

    let r2 = grid.radius_sq();
    let support = f
        .values()
        .iter()
        .zip(&r2)
        .filter(|(z, _)| z.norm() > NEGLIGIBLE * peak)
        .map(|(_, r)| r.sqrt())
        .fold(0.0, f64::max);
    if sigma * support > grid.length() / 2.0 {
        return Err(precondition(format!(
            "scaled support {:.3} exceeds the half box {:.3}",
            sigma * support,
            grid.length() / 2.0
        )));
    }

    let mut hat = f.values().to_vec();
    dft_raw(&grid, &mut hat, Direction::Forward);
    let hat_peak = hat.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let k2 = grid.wavenumber_sq();
    let kmax = hat
        .iter()
        .zip(&k2)
        .filter(|(z, _)| z.norm() > NEGLIGIBLE * hat_peak)
        .map(|(_, k)| k.sqrt())
        .fold(0.0, f64::max);
    if kmax / sigma > grid.k_max() {
        return Err(precondition(format!(
            "scaled spectrum reaches |k| = {:.3} beyond the grid cutoff {:.3}",
            kmax / sigma,
            grid.k_max()
        )));
    }

    let n = grid.points_per_axis();
    let targets: Vec<f64> = grid.coords().iter().map(|x| x / sigma).collect();
    let norm = amp / grid.len() as f64;
    let values = match grid.dim() {
        1 => evaluate_series(&grid, &hat, &targets),
        _ => {
            // rows first, then columns
            let mut rows = vec![Complex64::new(0.0, 0.0); n * n];
            let partial: Vec<Vec<Complex64>> = hat
                .par_chunks(n)
                .map(|row| evaluate_series(&grid, row, &targets))
                .collect();
            for (m0, row) in partial.iter().enumerate() {
                for (j1, v) in row.iter().enumerate() {
                    rows[j1 * n + m0] = *v;
                }
            }
            let cols: Vec<Vec<Complex64>> = rows
                .par_chunks(n)
                .map(|col| evaluate_series(&grid, col, &targets))
                .collect();
            let mut out = vec![Complex64::new(0.0, 0.0); n * n];
            for (j1, col) in cols.iter().enumerate() {
                for (j0, v) in col.iter().enumerate() {
                    out[j0 * n + j1] = *v;
                }
            }
            out
        }
    };
    Field::new(grid, values.into_iter().map(|z| z * norm).collect())
}

/// Evaluates `Σ_m c_m e^{i k_m (y + L/2)}` at every target `y`, with the
/// Nyquist term taken as a cosine.
fn evaluate_series(grid: &Grid, coeffs: &[Complex64], targets: &[f64]) -> Vec<Complex64> {
    let n = coeffs.len();
    let half = n / 2;
    let cutoff = NEGLIGIBLE * 1e-3 * coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let top = (1..half)
        .rev()
        .find(|&m| coeffs[m].norm() > cutoff || coeffs[n - m].norm() > cutoff)
        .unwrap_or(0);
    let length = grid.length();
    targets
        .par_iter()
        .map(|&y| {
            let theta = 2.0 * PI * (y + length / 2.0) / length;
            let step = Complex64::cis(theta);
            let mut acc = coeffs[0];
            let mut w = Complex64::new(1.0, 0.0);
            for m in 1..=top {
                // periodic reseeding keeps the recurrence at round-off
                w = if m % 64 == 0 { Complex64::cis(theta * m as f64) } else { w * step };
                acc += coeffs[m] * w + coeffs[n - m] * w.conj();
            }
            acc + coeffs[half] * (theta * half as f64).cos()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::norms::{gradient_norm_sq, mass, moment_norm_sq};
    use crate::spectral::Profile;

    #[test]
    fn identity_at_unit_parameters() {
        let p = Profile::Gaussian { width: 1.0 };
        let g = p.grid_for(1, 4.0, 0.0).unwrap();
        let f = p.unit_mass(g);
        assert_eq!(scale_family(&f, 1.0, 1.0).unwrap(), f);
    }

    #[test]
    fn matches_direct_sampling() {
        let p = Profile::Gaussian { width: 1.0 };
        for d in [1, 2] {
            let g = Grid::new(d, if d == 1 { 512 } else { 128 }, if d == 1 { 60.0 } else { 50.0 }).unwrap();
            let f = p.sample(g, 1.0, 1.0);
            let s = scale_family(&f, 0.5, 3.0).unwrap();
            let direct = p.sample(g, 0.5, 3.0);
            let err = mass(&s.sub(&direct).unwrap()).sqrt();
            assert!(err < 1e-10, "d = {d}: {err}");
        }
    }

    #[test]
    fn scaling_laws() {
        let p = Profile::Sech { width: 1.0 };
        let g = p.grid_for(1, 4.0, 0.0).unwrap();
        let f = p.unit_mass(g);
        let (eps, sigma) = (0.3, 2.5);
        let s = scale_family(&f, eps, sigma).unwrap();
        assert!((mass(&s).sqrt() - eps).abs() < 1e-6 * eps);
        let grad = (gradient_norm_sq(&s) / gradient_norm_sq(&f)).sqrt();
        assert!((grad - eps / sigma).abs() < 1e-6 * eps / sigma);
        let mom = (moment_norm_sq(&s) / moment_norm_sq(&f)).sqrt();
        assert!((mom - eps * sigma).abs() < 1e-6 * eps * sigma);
    }

    #[test]
    fn rejects_overflowing_support() {
        let p = Profile::Gaussian { width: 1.0 };
        let g = p.grid_for(1, 1.0, 0.0).unwrap();
        assert!(scale_family(&p.sample(g, 1.0, 1.0), 1.0, 3.0).is_err());
        assert!(scale_family(&p.sample(g, 1.0, 1.0), 1.0, 0.25).is_err());
        assert!(scale_family(&p.sample(g, 1.0, 1.0), -1.0, 1.0).is_err());
    }
}
