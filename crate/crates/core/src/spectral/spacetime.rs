use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::norms::{lp_norm, lp_power};
use super::propagator::{wrap_check, FreeFlow};
use super::{Field, Grid};
use crate::error::{invalid, precondition, Error, Result};
use crate::exponents::Exponent;
use crate::fit::{fit_power_law, FitResult};
use crate::quadrature::{power_law_tail, TimeMesh};

/// Time-indexed source of fields on a fixed grid.
pub trait FieldSampler: Sync {
    fn grid(&self) -> &Grid;
    fn sample(&self, t: f64) -> Result<Field>;
}

/// `t ↦ e^{itΔ}φ`.
pub struct FreeEvolution {
    initial: Field,
    flow: FreeFlow,
}

impl FreeEvolution {
    pub fn new(initial: Field) -> Self {
        let flow = FreeFlow::new(*initial.grid());
        Self { initial, flow }
    }
}

impl FieldSampler for FreeEvolution {
    fn grid(&self) -> &Grid {
        self.initial.grid()
    }

    fn sample(&self, t: f64) -> Result<Field> {
        Ok(self.flow.propagate(&self.initial, t))
    }
}

/// Wraps a closure as a sampler.
pub struct FnSampler<F> {
    grid: Grid,
    f: F,
}

impl<F: Fn(f64) -> Result<Field> + Sync> FnSampler<F> {
    pub fn new(grid: Grid, f: F) -> Self {
        Self { grid, f }
    }
}

impl<F: Fn(f64) -> Result<Field> + Sync> FieldSampler for FnSampler<F> {
    fn grid(&self) -> &Grid {
        &self.grid
    }

    fn sample(&self, t: f64) -> Result<Field> {
        (self.f)(t)
    }
}

/// Treatment of `∫_T^∞` when the interval is unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailPolicy {
    /// Add the integral of a power law fitted to the last decade.
    PowerLaw,
    /// Stop at the horizon; the fitted tail is reported as a bound only.
    Cutoff,
}

/// Time mesh layout: `uniform_intervals` Simpson panels on `[t0, split]`,
/// then `per_decade` log-uniform panels per decade up to the horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeshSpec {
    pub split: f64,
    pub uniform_intervals: usize,
    pub per_decade: usize,
}

impl MeshSpec {
    pub const DEFAULT_UNIFORM_INTERVALS: usize = 64;
    pub const DEFAULT_PER_DECADE: usize = 48;
    /// Default horizon in units of the dispersive time.
    pub const DEFAULT_HORIZON_FACTOR: f64 = 40.0;

    /// Default layout for data with dispersive time `tau`.
    pub fn for_time_scale(tau: f64) -> Self {
        Self {
            split: tau,
            uniform_intervals: Self::DEFAULT_UNIFORM_INTERVALS,
            per_decade: Self::DEFAULT_PER_DECADE,
        }
    }

    pub fn mesh(&self, t0: f64, end: f64) -> Result<TimeMesh> {
        TimeMesh::graded(t0, self.split, end, self.uniform_intervals, self.per_decade)
    }
}

/// `‖u‖_{L_t^q L_x^r(I × ℝ^d)}` request.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormSpec {
    pub q: Exponent,
    pub r: Exponent,
    pub t0: f64,
    /// End of the interval; `f64::INFINITY` for `[t0, ∞)`.
    pub t1: f64,
    /// Last quadrature node when `t1` is infinite.
    pub horizon: f64,
    pub mesh: MeshSpec,
    pub tail: Option<TailPolicy>,
}

impl NormSpec {
    /// `L_{t,x}^{r}` on `[0, ∞)` with power-law tail, meshed for time scale `tau`.
    pub fn diagonal(r: f64, tau: f64) -> Self {
        Self {
            q: Exponent::Finite(r),
            r: Exponent::Finite(r),
            t0: 0.0,
            t1: f64::INFINITY,
            horizon: MeshSpec::DEFAULT_HORIZON_FACTOR * tau,
            mesh: MeshSpec::for_time_scale(tau),
            tail: Some(TailPolicy::PowerLaw),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for e in [self.q, self.r] {
            if e.value() < 1.0 {
                return Err(invalid(format!("exponent {e} below 1")));
            }
        }
        if !(self.t0.is_finite() && self.t0 >= 0.0 && self.t1 > self.t0) {
            return Err(invalid(format!("bad interval [{}, {}]", self.t0, self.t1)));
        }
        if self.t1.is_infinite() {
            if self.tail.is_none() && !self.q.is_infinite() {
                return Err(invalid("an unbounded interval needs a tail policy"));
            }
            if !(self.horizon.is_finite() && self.horizon > self.t0) {
                return Err(invalid(format!("horizon {} must exceed t0", self.horizon)));
            }
        }
        Ok(())
    }

    pub fn quadrature_end(&self) -> f64 {
        if self.t1.is_finite() {
            self.t1
        } else {
            self.horizon
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpacetimeNorm {
    pub norm: f64,
    /// `∫ ‖u(t)‖_r^q dt` over the quadrature nodes.
    pub integral: f64,
    /// Fitted `∫_T^∞`; zero on bounded intervals.
    pub tail: f64,
    pub tail_included: bool,
    pub tail_fraction: f64,
    pub tail_slope: Option<f64>,
    pub nodes: usize,
    pub horizon: f64,
}

/// Composite quadrature of `(∫ ‖u(t)‖_r^q dt)^{1/q}`, with `q = ∞` taken
/// as the maximum over nodes. Samples are evaluated in parallel.
pub fn spacetime_norm(sampler: &dyn FieldSampler, spec: &NormSpec) -> Result<SpacetimeNorm> {
    spec.validate()?;
    let end = spec.quadrature_end();
    let mesh = spec.mesh.mesh(spec.t0, end)?;
    let spatial: Vec<f64> = mesh
        .nodes()
        .par_iter()
        .map(|&t| {
            let u = sampler.sample(t)?;
            match (spec.q, spec.r) {
                (Exponent::Finite(q), Exponent::Finite(r)) if q == r => Ok(lp_power(&u, r)),
                (Exponent::Finite(q), r) => Ok(lp_norm(&u, r)?.powf(q)),
                (Exponent::Infinity, r) => lp_norm(&u, r),
            }
        })
        .collect::<Result<_>>()?;
    if let Some(t) = mesh.nodes().iter().zip(&spatial).find(|(_, v)| !v.is_finite()).map(|(t, _)| *t) {
        return Err(Error::NonFinite { t });
    }

    let q = match spec.q {
        Exponent::Infinity => {
            let sup = spatial.iter().cloned().fold(0.0, f64::max);
            return Ok(SpacetimeNorm {
                norm: sup,
                integral: sup,
                tail: 0.0,
                tail_included: false,
                tail_fraction: 0.0,
                tail_slope: None,
                nodes: mesh.len(),
                horizon: end,
            });
        }
        Exponent::Finite(q) => q,
    };
    let integral = mesh.integrate(&spatial);
    let (tail, included, slope) = match (spec.t1.is_infinite(), spec.tail) {
        (true, Some(policy)) => {
            let est = power_law_tail(mesh.nodes(), &spatial)?;
            (est.amount, policy == TailPolicy::PowerLaw, Some(est.slope))
        }
        _ => (0.0, false, None),
    };
    let total = integral + if included { tail } else { 0.0 };
    Ok(SpacetimeNorm {
        norm: total.powf(1.0 / q),
        integral,
        tail,
        tail_included: included,
        tail_fraction: if integral + tail > 0.0 { tail / (integral + tail) } else { 0.0 },
        tail_slope: slope,
        nodes: mesh.len(),
        horizon: end,
    })
}

/// Decay exponent `-(d/2 - d/r)` of `‖e^{itΔ}φ‖_{L^r}`.
pub fn dispersive_exponent(d: u32, r: Exponent) -> f64 {
    let d = d as f64;
    -(d / 2.0 - d * r.reciprocal())
}

/// Fits `log ‖e^{itΔ}f‖_r` against `log t`; the expected slope is
/// [`dispersive_exponent`]. Times must span at least one decade.
pub fn dispersive_decay_check(f: &Field, r: Exponent, times: &[f64]) -> Result<FitResult> {
    if r.value() < 2.0 {
        return Err(invalid(format!("decay check needs r in [2, ∞], got {r}")));
    }
    let lo = times.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = times.iter().cloned().fold(0.0, f64::max);
    if !(lo > 0.0 && hi / lo >= 10.0 * (1.0 - 1e-12)) {
        return Err(precondition(format!("decay check needs a decade of positive times, got [{lo}, {hi}]")));
    }
    if !wrap_check(f, hi).ok {
        log::warn!("decay check window reaches t = {hi}, beyond the wrap-around safe range");
    }
    let flow = FreeFlow::new(*f.grid());
    let pairs: Vec<(f64, f64)> = times
        .par_iter()
        .map(|&t| Ok((t, lp_norm(&flow.propagate(f, t), r)?)))
        .collect::<Result<_>>()?;
    fit_power_law(&pairs)
}
