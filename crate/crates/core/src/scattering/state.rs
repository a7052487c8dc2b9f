use serde::Serialize;

use crate::dynamics::{SolverConfig, StrangStepper};
use crate::error::{invalid, Error, Result};
use crate::spectral::{mass, wrap_check, Field, FreeFlow};

#[derive(Debug, Clone)]
pub struct ScatteringState {
    /// `u_+ ≈ e^{-iTΔ}u(T)` at the last doubling time.
    pub state: Field,
    pub meta: ScatteringMeta,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScatteringMeta {
    pub final_time: f64,
    /// Pullback times `T₁, 2T₁, 4T₁, …`.
    pub times: Vec<f64>,
    /// `‖e^{-iT_{k+1}Δ}u(T_{k+1}) - e^{-iT_kΔ}u(T_k)‖₂`.
    pub increments: Vec<f64>,
    pub steps: usize,
}

/// Doublings without a decrease in the Cauchy increment before giving up.
pub const STALL_DOUBLINGS: usize = 3;

/// Scattering state by Strang integration with time doubling. Starts at
/// `cfg.t_final` and doubles until consecutive pullbacks differ by less
/// than `tol` in `L²`.
pub fn scattering_state(phi: &Field, cfg: &SolverConfig, tol: f64, max_doublings: usize) -> Result<ScatteringState> {
    if !(tol > 0.0) {
        return Err(invalid(format!("tolerance must be positive, got {tol}")));
    }
    if !(cfg.t_final > 0.0 && cfg.dt > 0.0) {
        return Err(invalid("scattering state needs a positive first horizon and time step"));
    }
    if *phi.grid() != cfg.grid {
        return Err(invalid("initial field and solver config use different grids"));
    }
    if phi.is_zero() {
        return Ok(ScatteringState {
            state: phi.clone(),
            meta: ScatteringMeta { final_time: 0.0, times: vec![], increments: vec![], steps: 0 },
        });
    }
    let t_max = cfg.t_final * 2f64.powi(max_doublings as i32);
    if !wrap_check(phi, t_max).ok {
        log::warn!("grid may be too small for free transport up to t = {t_max}");
    }
    let flow = FreeFlow::new(cfg.grid);
    let mut stepper = StrangStepper::new(cfg.grid, cfg.params.p, cfg.nonlinear);
    let mut u = phi.values().to_vec();
    let mut t = 0.0;
    let mut times = Vec::new();
    let mut increments: Vec<f64> = Vec::new();
    let mut previous: Option<Field> = None;
    let mut target = cfg.t_final;
    for _ in 0..=max_doublings {
        stepper.advance(&mut u, t, target - t, cfg.dt)?;
        t = target;
        let pulled = flow.propagate(&Field::from_parts(cfg.grid, u.clone()), -t);
        times.push(t);
        if let Some(prev) = &previous {
            let inc = mass(&pulled.sub(prev)?).sqrt();
            increments.push(inc);
            if inc < tol {
                return Ok(ScatteringState {
                    state: pulled,
                    meta: ScatteringMeta { final_time: t, times, increments, steps: stepper.steps() },
                });
            }
            let k = increments.len();
            if k > STALL_DOUBLINGS && increments[k - 1 - STALL_DOUBLINGS..].windows(2).all(|w| w[1] >= w[0]) {
                return Err(Error::NotContracting(format!(
                    "Cauchy increments {:?} did not decay over {STALL_DOUBLINGS} doublings; data too large or grid too small",
                    &increments[k - 1 - STALL_DOUBLINGS..]
                )));
            }
        }
        previous = Some(pulled);
        target *= 2.0;
    }
    Err(Error::NotContracting(format!(
        "increments {:?} still above tol {tol} after {max_doublings} doublings",
        increments
    )))
}
