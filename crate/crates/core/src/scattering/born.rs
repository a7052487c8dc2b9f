use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::kernel::{Kernel, TimeSettings};
use crate::error::Result;
use crate::exponents::{Exponent, PhysParams};
use crate::spectral::{spacetime_norm, wrap_check, Field, FreeEvolution, NormSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(default)]
pub struct BornSettings {
    pub time: TimeSettings,
    /// When set, the horizon doubles until the last node contributes less
    /// than this fraction of the integral, capped by the wrap-around bound.
    pub adaptive_tol: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct BornReport {
    /// `B(φ) = ∫₀^∞ e^{-isΔ}F(e^{isΔ}φ) ds`.
    pub born: Field,
    pub norm: f64,
    /// `∫₀^∞ ⟨e^{-isΔ}F(e^{isΔ}φ), φ⟩ ds`.
    pub duality_lhs: f64,
    /// `‖e^{itΔ}φ‖_{p+2,p+2}^{p+2}` from the spacetime quadrature.
    pub duality_rhs: f64,
    pub duality_gap: f64,
    pub tail_fraction: f64,
    pub tail_slope: Option<f64>,
    pub horizon: f64,
    pub nodes: usize,
    /// The adaptive horizon stopped at the wrap-around bound.
    pub horizon_capped: bool,
}

fn zero_report(phi: &Field) -> BornReport {
    BornReport {
        born: Field::zeros(*phi.grid()),
        norm: 0.0,
        duality_lhs: 0.0,
        duality_rhs: 0.0,
        duality_gap: 0.0,
        tail_fraction: 0.0,
        tail_slope: None,
        horizon: 0.0,
        nodes: 0,
        horizon_capped: false,
    }
}

/// Born term on a graded time mesh with power-law tail, plus both sides
/// of the duality identity on the shared quadrature.
pub fn born_term(phi: &Field, params: PhysParams, settings: &BornSettings) -> Result<BornReport> {
    if phi.is_zero() {
        return Ok(zero_report(phi));
    }
    let p = params.p;
    let mut time = settings.time;
    let mut capped = false;
    let (tau, mut mesh) = time.mesh_for(phi)?;
    let (kernel, free) = loop {
        let kernel = Kernel::new(*phi.grid(), p, mesh);
        let free = kernel.free_integrand(phi, time.tail)?;
        let Some(tol) = settings.adaptive_tol else { break (kernel, free) };
        let t_end = kernel.mesh.end();
        let last = *free.lp.last().expect("nonempty mesh");
        let integral = kernel.mesh.integrate(&free.lp);
        if t_end * last <= tol * integral {
            break (kernel, free);
        }
        let check = wrap_check(phi, 2.0 * t_end);
        if !check.ok {
            capped = true;
            break (kernel, free);
        }
        time.horizon_factor *= 2.0;
        mesh = time.mesh_spec(tau).mesh(0.0, time.horizon_factor * tau)?;
    };

    let total = kernel.total(&free.g0_hat, free.tail_factor);
    let born = kernel.physical(&total, Complex64::new(1.0, 0.0));
    let scale = kernel.grid.len() as f64 * kernel.grid.cell_volume();
    let lhs: Complex64 = total.iter().zip(&free.g_hat).map(|(b, g)| b * g.conj()).sum();
    let duality_lhs = lhs.re * scale;

    let spec = NormSpec {
        q: Exponent::Finite(p + 2.0),
        r: Exponent::Finite(p + 2.0),
        t0: 0.0,
        t1: f64::INFINITY,
        horizon: kernel.mesh.end(),
        mesh: time.mesh_spec(tau),
        tail: Some(time.tail),
    };
    let st = spacetime_norm(&FreeEvolution::new(phi.clone()), &spec)?;
    let duality_rhs = st.integral + if st.tail_included { st.tail } else { 0.0 };
    let tail_amount = free.tail.map_or(0.0, |t| t.amount);
    let integral = kernel.mesh.integrate(&free.lp);
    Ok(BornReport {
        norm: kernel.l2_norm(&total),
        born,
        duality_lhs,
        duality_rhs,
        duality_gap: (duality_lhs - duality_rhs).abs() / duality_rhs.abs(),
        tail_fraction: tail_amount / (integral + tail_amount),
        tail_slope: free.tail.map(|t| t.slope),
        horizon: kernel.mesh.end(),
        nodes: kernel.mesh.len(),
        horizon_capped: capped,
    })
}
