use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::nonlinearity::phase_rotate;
use crate::error::{invalid, Error, Result};
use crate::exponents::PhysParams;
use crate::spectral::fourier::{dft_raw, Direction};
use crate::spectral::{wrap_check, Field, Grid};

/// Largest nonlinear phase per step before the monitor warns.
pub const PHASE_LIMIT: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub params: PhysParams,
    pub grid: Grid,
    pub dt: f64,
    pub t_final: f64,
    /// Times at which snapshots are kept; hit exactly.
    pub sample_times: Vec<f64>,
    /// With `false` the solver reduces to the exact free flow.
    #[serde(default = "default_true")]
    pub nonlinear: bool,
}

fn default_true() -> bool {
    true
}

impl SolverConfig {
    pub fn new(params: PhysParams, grid: Grid, dt: f64, t_final: f64) -> Self {
        Self { params, grid, dt, t_final, sample_times: vec![0.0, t_final], nonlinear: true }
    }

    pub fn with_samples(mut self, times: Vec<f64>) -> Self {
        self.sample_times = times;
        self
    }

    pub fn linear(mut self) -> Self {
        self.nonlinear = false;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(invalid(format!("time step must be positive, got {}", self.dt)));
        }
        if !(self.t_final.is_finite() && self.t_final >= 0.0) {
            return Err(invalid(format!("final time must be finite and >= 0, got {}", self.t_final)));
        }
        if self.sample_times.is_empty() {
            return Err(invalid("at least one sample time is required"));
        }
        if self.sample_times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("sample times must be strictly increasing"));
        }
        let (lo, hi) = (self.sample_times[0], *self.sample_times.last().expect("nonempty"));
        if lo < 0.0 || hi > self.t_final {
            return Err(invalid(format!("sample times must lie in [0, {}]", self.t_final)));
        }
        Ok(())
    }
}

/// Time-stamped snapshots of one run.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub snapshots: Vec<(f64, Field)>,
    pub config: SolverConfig,
    pub steps: usize,
    /// Largest nonlinear phase `|u|^p dt` seen in a single step.
    pub max_phase_per_step: f64,
}

impl Trajectory {
    pub fn last(&self) -> &(f64, Field) {
        self.snapshots.last().expect("trajectory holds at least one snapshot")
    }
}

/// Strang splitting `L(h/2) N(h) L(h/2)` with adjacent half steps merged.
pub struct StrangStepper {
    grid: Grid,
    k2: Vec<f64>,
    p: f64,
    nonlinear: bool,
    max_phase: f64,
    steps: usize,
    warned: bool,
}

impl StrangStepper {
    pub fn new(grid: Grid, p: f64, nonlinear: bool) -> Self {
        Self { grid, k2: grid.wavenumber_sq(), p, nonlinear, max_phase: 0.0, steps: 0, warned: false }
    }

    /// Steps taken so far.
    pub fn steps(&self) -> usize {
        self.steps
    }

    fn multiplier(&self, t: f64) -> Vec<Complex64> {
        let s = 1.0 / self.grid.len() as f64;
        self.k2.iter().map(|k2| Complex64::cis(-k2 * t) * s).collect()
    }

    fn linear(&self, u: &mut [Complex64], mult: &[Complex64]) {
        dft_raw(&self.grid, u, Direction::Forward);
        u.iter_mut().zip(mult).for_each(|(z, m)| *z *= m);
        dft_raw(&self.grid, u, Direction::Inverse);
    }

    fn nonlinear_step(&mut self, u: &mut [Complex64], h: f64, t: f64) -> Result<()> {
        let phase = phase_rotate(u, self.p, h).ok_or(Error::NonFinite { t })?;
        self.max_phase = self.max_phase.max(phase);
        if phase > PHASE_LIMIT && !self.warned {
            log::warn!("nonlinear phase {phase:.3} rad per step at t = {t:.4} exceeds {PHASE_LIMIT}");
            self.warned = true;
        }
        Ok(())
    }

    /// Advances `u` from `t0` by `span` using `ceil(span/dt)` equal steps.
    pub fn advance(&mut self, u: &mut [Complex64], t0: f64, span: f64, dt: f64) -> Result<()> {
        if span <= 0.0 {
            return Ok(());
        }
        let n = (span / dt * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        let h = span / n as f64;
        if !self.nonlinear {
            let full = self.multiplier(span);
            self.linear(u, &full);
            self.steps += n;
            return Ok(());
        }
        let half = self.multiplier(h / 2.0);
        let full = self.multiplier(h);
        self.linear(u, &half);
        for i in 0..n {
            self.nonlinear_step(u, h, t0 + (i as f64 + 0.5) * h)?;
            self.linear(u, if i + 1 == n { &half } else { &full });
        }
        self.steps += n;
        if u.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite { t: t0 + span });
        }
        Ok(())
    }
}

/// Integrates `i u_t + Δu = |u|^p u` from `φ` at `t = 0`, keeping a
/// snapshot at every configured sample time.
pub fn evolve(phi: &Field, cfg: &SolverConfig) -> Result<Trajectory> {
    cfg.validate()?;
    if *phi.grid() != cfg.grid {
        return Err(invalid("initial field and solver config use different grids"));
    }
    if !wrap_check(phi, cfg.t_final).ok {
        log::warn!("grid may be too small for free transport up to t = {}", cfg.t_final);
    }
    let mut stepper = StrangStepper::new(cfg.grid, cfg.params.p, cfg.nonlinear);
    let mut u = phi.values().to_vec();
    let mut t = 0.0;
    let mut snapshots = Vec::with_capacity(cfg.sample_times.len());
    for &ts in &cfg.sample_times {
        stepper.advance(&mut u, t, ts - t, cfg.dt)?;
        t = ts;
        snapshots.push((t, Field::from_parts(cfg.grid, u.clone())));
    }
    Ok(Trajectory {
        snapshots,
        config: cfg.clone(),
        steps: stepper.steps,
        max_phase_per_step: stepper.max_phase,
    })
}
