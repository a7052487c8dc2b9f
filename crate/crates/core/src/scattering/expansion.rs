use num_complex::Complex64;
use serde::Serialize;

use super::picard::{solve_map, MapKind, MapSettings, MapSolution};
use crate::error::Result;
use crate::exponents::{sharpened_q, unsharpened_q, PhysParams};
use crate::spectral::{mass, sigma_norm, Field};

/// Relative slack for the numerical inequalities of the lower-bound chain.
const CHAIN_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, Serialize)]
pub struct LowerBoundChain {
    /// `‖T_±(φ) - φ‖₂ ≥ ‖B(φ)‖₂ - ‖e_±(φ)‖₂`.
    pub displacement_bound: bool,
    /// `‖B(φ)‖₂ ≥ ‖e^{itΔ}φ‖_{p+2,p+2}^{p+2} / ‖φ‖₂`.
    pub born_bound: bool,
    /// `‖e^{itΔ}φ‖_{p+2,p+2}^{p+2} / ‖φ‖₂`.
    pub duality_quotient: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Convergence {
    pub time_scale: f64,
    pub horizon: f64,
    pub nodes: usize,
    pub tail_fraction: f64,
    pub tail_slope: Option<f64>,
    pub iterations: usize,
    pub picard_residuals: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExpansionReport {
    pub map: &'static str,
    pub sign_convention: &'static str,
    pub l2_norm: f64,
    pub sigma_norm: f64,
    pub displacement_norm: f64,
    pub born_norm: f64,
    pub error_norm: f64,
    /// `2(2p+1)/(p+2)`.
    pub comparison_exponent: f64,
    pub sharpened_exponent: Option<f64>,
    /// `‖(T_±(φ) - φ) ∓ iB(φ) - e_±(φ)‖₂ / ‖T_±(φ) - φ‖₂`.
    pub reconstruction_residual: f64,
    pub lower_bounds: LowerBoundChain,
    pub convergence: Convergence,
    #[serde(skip)]
    pub solution: MapSolution,
}

/// `e_±(φ) = T_±(φ) - φ ∓ iB(φ)` with norms, the comparison exponent and
/// the lower-bound chain.
pub fn expansion_error(
    phi: &Field,
    params: PhysParams,
    kind: MapKind,
    settings: &MapSettings,
    sharpened: Option<(f64, f64)>,
) -> Result<ExpansionReport> {
    let sol = solve_map(phi, params, kind, settings)?;
    let signed_born = sol.born.map(|z| z * Complex64::new(0.0, kind.sign()));
    let rebuilt = signed_born.add(&sol.error)?;
    let gap = mass(&sol.displacement.sub(&rebuilt)?).sqrt();
    let reconstruction_residual = if sol.displacement_norm > 0.0 { gap / sol.displacement_norm } else { gap };
    let l2 = sol.amplitude;
    let duality_quotient = if l2 > 0.0 { sol.free_spacetime / l2 } else { 0.0 };
    let slack = |x: f64| CHAIN_SLACK * x.abs();
    let lower_bounds = LowerBoundChain {
        displacement_bound: sol.displacement_norm + slack(sol.born_norm) >= sol.born_norm - sol.error_norm,
        born_bound: sol.born_norm + slack(sol.born_norm) >= duality_quotient,
        duality_quotient,
    };
    let sharpened_exponent = match sharpened {
        Some((eta, nu)) => Some(sharpened_q(params, eta, nu)?),
        None => None,
    };
    Ok(ExpansionReport {
        map: kind.tag(),
        sign_convention: kind.sign_convention(),
        l2_norm: l2,
        sigma_norm: sigma_norm(phi),
        displacement_norm: sol.displacement_norm,
        born_norm: sol.born_norm,
        error_norm: sol.error_norm,
        comparison_exponent: unsharpened_q(params),
        sharpened_exponent,
        reconstruction_residual,
        lower_bounds,
        convergence: Convergence {
            time_scale: sol.time_scale,
            horizon: sol.horizon,
            nodes: sol.nodes,
            tail_fraction: sol.tail_fraction,
            tail_slope: sol.tail_slope,
            iterations: sol.iterations,
            picard_residuals: sol.residuals.clone(),
        },
        solution: sol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Profile;

    fn setup(eps: f64) -> (Field, PhysParams) {
        let prof = Profile::Gaussian { width: 1.0 };
        let grid = prof.grid_for(1, 1.0, 40.0).unwrap();
        (prof.unit_mass(grid).scale(eps), PhysParams::new(1, 3.0).unwrap())
    }

    #[test]
    fn reconstruction_and_chain() {
        let (f, params) = setup(0.1);
        for kind in [MapKind::Scattering, MapKind::Wave] {
            let r = expansion_error(&f, params, kind, &MapSettings::default(), Some((0.9, 0.75))).unwrap();
            assert!(r.reconstruction_residual < 1e-12, "{}", r.reconstruction_residual);
            assert!(r.lower_bounds.displacement_bound && r.lower_bounds.born_bound);
            assert!(r.error_norm < 0.05 * r.born_norm);
            assert!((r.comparison_exponent - 2.8).abs() < 1e-12);
            assert!(r.sharpened_exponent.is_some());
            assert!(r.convergence.picard_residuals.last().unwrap() < &1e-12);
        }
    }

    #[test]
    fn error_is_higher_order() {
        let params = PhysParams::new(1, 3.0).unwrap();
        let norms: Vec<f64> = [1.0 / 32.0, 1.0 / 16.0]
            .iter()
            .map(|&e| {
                let (f, _) = setup(e);
                expansion_error(&f, params, MapKind::Scattering, &MapSettings::default(), None).unwrap().error_norm
            })
            .collect();
        let slope = (norms[1] / norms[0]).log2();
        assert!((slope - 7.0).abs() < 0.05, "{slope}");
    }
}
