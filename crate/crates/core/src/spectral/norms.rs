use super::fourier::{dft_unitary, Direction};
use super::Field;
use crate::error::{invalid, Result};
use crate::exponents::Exponent;

/// `∫ |f|^r dx` for finite `r > 0`.
pub fn lp_power(f: &Field, r: f64) -> f64 {
    let s: f64 = if r == 2.0 {
        f.values().iter().map(|z| z.norm_sqr()).sum()
    } else {
        f.values().iter().map(|z| z.norm().powf(r)).sum()
    };
    s * f.grid().cell_volume()
}

/// `‖f‖_{L^r}` by the rectangle rule, `r ∈ [1, ∞]`.
pub fn lp_norm(f: &Field, r: Exponent) -> Result<f64> {
    match r {
        Exponent::Infinity => Ok(f.values().iter().map(|z| z.norm()).fold(0.0, f64::max)),
        Exponent::Finite(r) if r >= 1.0 => Ok(lp_power(f, r).powf(1.0 / r)),
        Exponent::Finite(r) => Err(invalid(format!("Lebesgue exponent must be >= 1, got {r}"))),
    }
}

/// `‖f‖₂²`.
pub fn mass(f: &Field) -> f64 {
    lp_power(f, 2.0)
}

/// `‖∇f‖₂²`, computed spectrally through Parseval.
pub fn gradient_norm_sq(f: &Field) -> f64 {
    let mut fh = f.values().to_vec();
    dft_unitary(f.grid(), &mut fh, Direction::Forward);
    let k2 = f.grid().wavenumber_sq();
    let s: f64 = fh.iter().zip(&k2).map(|(z, k)| k * z.norm_sqr()).sum();
    s * f.grid().cell_volume()
}

/// `‖x f‖₂²` with coordinates centred on the box.
pub fn moment_norm_sq(f: &Field) -> f64 {
    let r2 = f.grid().radius_sq();
    let s: f64 = f.values().iter().zip(&r2).map(|(z, r)| r * z.norm_sqr()).sum();
    s * f.grid().cell_volume()
}

/// `‖f‖_Σ = (‖f‖₂² + ‖∇f‖₂² + ‖xf‖₂²)^{1/2}`.
pub fn sigma_norm(f: &Field) -> f64 {
    (mass(f) + gradient_norm_sq(f) + moment_norm_sq(f)).sqrt()
}

/// `E(f) = ½‖∇f‖₂² + ‖f‖_{p+2}^{p+2}/(p+2)`.
pub fn energy(f: &Field, p: f64) -> f64 {
    0.5 * gradient_norm_sq(f) + lp_power(f, p + 2.0) / (p + 2.0)
}

/// Dispersive time scale `‖xf‖₂/‖∇f‖₂`; equals `w²` for a Gaussian of width `w`.
pub fn dispersive_time(f: &Field) -> Result<f64> {
    let g = gradient_norm_sq(f);
    if g <= 0.0 {
        return Err(invalid("dispersive time undefined for a field with no gradient"));
    }
    Ok((moment_norm_sq(f) / g).sqrt())
}
