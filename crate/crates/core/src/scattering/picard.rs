//! Scattering map `S` and wave operator `W` by Picard iteration on the
//! interaction-picture profile, with the amplitude factored out.
//!
//! For `φ = εψ` with `‖ψ‖₂ = 1` and `λ = ε^p`, the profile
//! `v(t) = e^{-itΔ}u(t) = ε(ψ + δ(t))` solves
//! `δ(t) = -iλ ∫₀^t G(s; ψ + δ) ds` for `S` and
//! `δ(t) = +iλ ∫_t^∞ G(s; ψ + δ) ds` for `W`, where
//! `G(s; g) = e^{-isΔ}F(e^{isΔ}g)`. Beyond the last node the profile is
//! frozen, i.e. the solution is replaced by its free evolution.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::kernel::{Coeffs, Kernel, TimeSettings};
use crate::error::{invalid, Error, Result};
use crate::exponents::PhysParams;
use crate::spectral::{mass, Field};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MapKind {
    /// `S = T₋`, initial data to scattering state.
    Scattering,
    /// `W = T₊`, asymptotic state to initial data.
    Wave,
}

impl MapKind {
    /// `∓1`: the sign in `T_± = φ ± iB(φ) + e_±`.
    pub fn sign(self) -> f64 {
        match self {
            MapKind::Scattering => -1.0,
            MapKind::Wave => 1.0,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            MapKind::Scattering => "S",
            MapKind::Wave => "W",
        }
    }

    pub fn sign_convention(self) -> &'static str {
        match self {
            MapKind::Scattering => "S(phi) = phi - i B(phi) + e_-(phi)",
            MapKind::Wave => "W(phi) = phi + i B(phi) + e_+(phi)",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MapSettings {
    pub time: TimeSettings,
    /// Stop when `sup_t ‖δ_{k+1} - δ_k‖₂ <= tol · sup_t ‖δ_{k+1}‖₂`.
    pub tol: f64,
    pub max_iter: usize,
    pub nonlinear: bool,
}

impl Default for MapSettings {
    fn default() -> Self {
        Self { time: TimeSettings::default(), tol: 1e-12, max_iter: 100, nonlinear: true }
    }
}

#[derive(Debug, Clone)]
pub struct MapSolution {
    pub kind: MapKind,
    /// `ε = ‖φ‖₂`.
    pub amplitude: f64,
    /// `λ = ε^p`.
    pub coupling: f64,
    /// `T_±(φ)`.
    pub image: Field,
    /// `B(φ)`.
    pub born: Field,
    /// `e_±(φ) = T_±(φ) - φ ∓ iB(φ)`.
    pub error: Field,
    /// `T_±(φ) - φ`, kept separately so that it does not round against `φ`.
    pub displacement: Field,
    pub displacement_norm: f64,
    pub born_norm: f64,
    pub error_norm: f64,
    /// `Re ⟨B(φ), φ⟩`.
    pub born_pairing: f64,
    /// `‖e^{itΔ}φ‖_{p+2,p+2}^{p+2}` on the same mesh and tail rule.
    pub free_spacetime: f64,
    pub tail_fraction: f64,
    pub tail_slope: Option<f64>,
    pub time_scale: f64,
    pub horizon: f64,
    pub nodes: usize,
    pub iterations: usize,
    /// `sup_t ‖δ_{k+1} - δ_k‖₂ / sup_t ‖δ_{k+1}‖₂` per sweep.
    pub residuals: Vec<f64>,
}

fn trivial(phi: &Field, kind: MapKind, amplitude: f64, p: f64) -> MapSolution {
    let zero = Field::zeros(*phi.grid());
    MapSolution {
        kind,
        amplitude,
        coupling: amplitude.powf(p),
        image: phi.clone(),
        born: zero.clone(),
        error: zero.clone(),
        displacement: zero,
        displacement_norm: 0.0,
        born_norm: 0.0,
        error_norm: 0.0,
        born_pairing: 0.0,
        free_spacetime: 0.0,
        tail_fraction: 0.0,
        tail_slope: None,
        time_scale: 0.0,
        horizon: 0.0,
        nodes: 0,
        iterations: 0,
        residuals: Vec::new(),
    }
}

fn axpy(coef: Complex64, a: &[Complex64], b: &[Complex64]) -> Coeffs {
    a.iter().zip(b).map(|(x, y)| coef * (x + y)).collect()
}

/// Evaluates `T_±(φ)` together with `B(φ)` and `e_±(φ)` on one shared
/// time discretization.
pub fn solve_map(phi: &Field, params: PhysParams, kind: MapKind, settings: &MapSettings) -> Result<MapSolution> {
    if !(settings.tol > 0.0 && settings.max_iter > 0) {
        return Err(invalid("Picard iteration needs tol > 0 and max_iter > 0"));
    }
    let p = params.p;
    let eps = mass(phi).sqrt();
    if eps == 0.0 || !settings.nonlinear {
        return Ok(trivial(phi, kind, eps, p));
    }
    let psi = phi.scale(1.0 / eps);
    let (tau, mesh) = settings.time.mesh_for(&psi)?;
    let kernel = Kernel::new(*phi.grid(), p, mesh);
    let free = kernel.free_integrand(&psi, settings.time.tail)?;
    let lambda = eps.powf(p);
    let coef = Complex64::new(0.0, kind.sign() * lambda);
    let nodes = kernel.mesh.len();
    let tf = free.tail_factor;

    let c0 = kernel.cumulative(&free.g0_hat);
    let total0 = kernel.total(&free.g0_hat, tf);
    let update = |d_hat: &[Coeffs]| -> (Vec<Coeffs>, Coeffs) {
        let cd = kernel.cumulative(d_hat);
        let total_d = kernel.total(d_hat, tf);
        let delta = (0..nodes)
            .map(|k| match kind {
                MapKind::Scattering => axpy(coef, &c0[k], &cd[k]),
                MapKind::Wave => total0
                    .iter()
                    .zip(&total_d)
                    .zip(c0[k].iter().zip(&cd[k]))
                    .map(|((t0, td), (a, b))| coef * ((t0 + td) - (a + b)))
                    .collect(),
            })
            .collect();
        (delta, total_d)
    };

    let zero = vec![Complex64::new(0.0, 0.0); kernel.grid.len()];
    let mut delta = vec![zero.clone(); nodes];
    let mut residuals = Vec::new();
    let mut growth = 0;
    let mut converged = false;
    for _ in 0..settings.max_iter {
        let d_hat = kernel.difference(&free.g_hat, &delta);
        let (next, _) = update(&d_hat);
        let change = next
            .iter()
            .zip(&delta)
            .map(|(a, b)| kernel.l2_norm(&a.iter().zip(b).map(|(x, y)| x - y).collect::<Vec<_>>()))
            .fold(0.0, f64::max);
        let size = next.iter().map(|a| kernel.l2_norm(a)).fold(0.0, f64::max);
        let r = if size > 0.0 { change / size } else { 0.0 };
        if !r.is_finite() {
            return Err(Error::NotContracting(format!(
                "{} iterate overflowed after {} sweeps at amplitude {eps:.3e}",
                kind.tag(),
                residuals.len() + 1
            )));
        }
        if let Some(&prev) = residuals.last() {
            growth = if r >= prev { growth + 1 } else { 0 };
        }
        residuals.push(r);
        delta = next;
        if r <= settings.tol {
            converged = true;
            break;
        }
        if growth >= 3 {
            break;
        }
    }
    if !converged {
        return Err(Error::NotContracting(format!(
            "{} residuals {:?} after {} sweeps at amplitude {eps:.3e}; data too large or mesh too coarse",
            kind.tag(),
            residuals.iter().rev().take(3).collect::<Vec<_>>(),
            residuals.len()
        )));
    }
    let d_hat = kernel.difference(&free.g_hat, &delta);
    let total_d = kernel.total(&d_hat, tf);
    let displacement: Coeffs = total0.iter().zip(&total_d).map(|(a, b)| a + b).collect();

    let el = eps * lambda;
    let born = kernel.physical(&total0, Complex64::new(el, 0.0));
    let error = kernel.physical(&total_d, coef * eps);
    let moved = kernel.physical(&displacement, coef * eps);
    let image = phi.add(&moved)?;
    let scale = kernel.grid.len() as f64 * kernel.grid.cell_volume();
    let pairing: Complex64 = total0.iter().zip(&free.g_hat).map(|(b, g)| b * g.conj()).sum();
    let lp_total = kernel.mesh.integrate(&free.lp);
    let lp_tail = free.tail.map_or(0.0, |t| t.amount);
    let eps_p2 = el * eps;
    Ok(MapSolution {
        kind,
        amplitude: eps,
        coupling: lambda,
        image,
        born,
        error,
        displacement: moved,
        displacement_norm: el * kernel.l2_norm(&displacement),
        born_norm: el * kernel.l2_norm(&total0),
        error_norm: el * kernel.l2_norm(&total_d),
        born_pairing: eps_p2 * pairing.re * scale,
        free_spacetime: eps_p2 * (lp_total + lp_tail * if tf != 0.0 { 1.0 } else { 0.0 }),
        tail_fraction: if lp_total + lp_tail > 0.0 { lp_tail / (lp_total + lp_tail) } else { 0.0 },
        tail_slope: free.tail.map(|t| t.slope),
        time_scale: tau,
        horizon: kernel.mesh.end(),
        nodes,
        iterations: residuals.len() + 1,
        residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{mass, Profile};

    fn setup() -> (Field, PhysParams) {
        let prof = Profile::Gaussian { width: 1.0 };
        let grid = prof.grid_for(1, 1.0, 40.0).unwrap();
        (prof.unit_mass(grid).scale(0.07), PhysParams::new(1, 3.0).unwrap())
    }

    #[test]
    fn linear_maps_are_identity() {
        let (f, params) = setup();
        let s = MapSettings { nonlinear: false, ..Default::default() };
        for kind in [MapKind::Scattering, MapKind::Wave] {
            let sol = solve_map(&f, params, kind, &s).unwrap();
            assert_eq!(sol.image, f);
            assert_eq!(sol.displacement_norm, 0.0);
        }
    }

    #[test]
    fn wave_then_scattering_round_trip() {
        let (psi, params) = setup();
        let s = MapSettings::default();
        let w = solve_map(&psi, params, MapKind::Wave, &s).unwrap();
        let back = solve_map(&w.image, params, MapKind::Scattering, &s).unwrap();
        let err = mass(&back.image.sub(&psi).unwrap()).sqrt();
        assert!(err < 1e-9 && w.displacement_norm > 1e-6, "{err}");
    }

    #[test]
    fn large_data_does_not_contract() {
        let (f, params) = setup();
        let s = MapSettings { max_iter: 5, ..Default::default() };
        let r = solve_map(&f.scale(100.0), params, MapKind::Scattering, &s);
        assert!(matches!(r, Err(Error::NotContracting(_))));
    }
}
