use num_complex::Complex64;

use crate::spectral::Field;

/// `|z|^p`, evaluated as `exp(p ln|z|)` with `0^p = 0`.
#[inline]
pub fn modulus_power(z: Complex64, p: f64) -> f64 {
    let r2 = z.norm_sqr();
    if r2 == 0.0 {
        0.0
    } else if p == 2.0 {
        r2
    } else {
        (0.5 * p * r2.ln()).exp()
    }
}

/// `F(z) = |z|^p z`.
#[inline]
pub fn nonlinearity(z: Complex64, p: f64) -> Complex64 {
    z * modulus_power(z, p)
}

/// `|b + w|^p - |b|^p` without cancellation when `|w| ≪ |b|`.
#[inline]
pub fn power_difference(b: Complex64, w: Complex64, p: f64) -> f64 {
    let a = b + w;
    let big_b = b.norm_sqr();
    // |a|² - |b|² = Re(w · conj(a + b))
    let diff = (w * (a + b).conj()).re;
    if big_b == 0.0 {
        return modulus_power(a, p);
    }
    let ratio = diff / big_b;
    if ratio <= -1.0 {
        return -modulus_power(b, p);
    }
    modulus_power(b, p) * (0.5 * p * ratio.ln_1p()).exp_m1()
}

/// `F(b + w) - F(b)`, accurate relative to `|w|`.
#[inline]
pub fn nonlinearity_difference(b: Complex64, w: Complex64, p: f64) -> Complex64 {
    let a = b + w;
    w * modulus_power(a, p) + b * power_difference(b, w, p)
}

/// Rotates `values` by `e^{-i|u|^p τ}` in place and returns the largest
/// phase `|u|^p |τ|`, or `None` if a sample is not finite.
pub(crate) fn phase_rotate(values: &mut [Complex64], p: f64, tau: f64) -> Option<f64> {
    let mut max_phase: f64 = 0.0;
    for z in values.iter_mut() {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return None;
        }
        let phase = modulus_power(*z, p) * tau;
        max_phase = max_phase.max(phase.abs());
        *z *= Complex64::cis(-phase);
    }
    Some(max_phase)
}

/// Exact flow of `i u_t = |u|^p u` over time `τ`: `u ↦ e^{-i|u|^p τ} u`.
pub fn nonlinear_phase_step(f: &Field, p: f64, tau: f64) -> Field {
    f.map(|z| z * Complex64::cis(-modulus_power(z, p) * tau))
}
