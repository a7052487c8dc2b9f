//! Interaction-picture integrand `G(s; g) = e^{-isΔ} F(e^{isΔ} g)` sampled
//! on a time mesh. Fourier coefficients are stored as `DFT(x)/N`, so the
//! unnormalized inverse transform returns physical samples.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::nonlinearity::{modulus_power, nonlinearity, nonlinearity_difference};
use crate::error::{invalid, Result};
use crate::quadrature::{power_law_tail, TailEstimate, TimeMesh};
use crate::spectral::fourier::{dft_raw, Direction};
use crate::spectral::norms::dispersive_time;
use crate::spectral::{wrap_check, Field, Grid, MeshSpec, TailPolicy};

/// Time discretization shared by the Born term and the map solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TimeSettings {
    /// Quadrature horizon in units of the dispersive time `‖xψ‖/‖∇ψ‖`.
    pub horizon_factor: f64,
    pub uniform_intervals: usize,
    pub per_decade: usize,
    pub tail: TailPolicy,
}

impl Default for TimeSettings {
    fn default() -> Self {
        Self {
            horizon_factor: MeshSpec::DEFAULT_HORIZON_FACTOR,
            uniform_intervals: MeshSpec::DEFAULT_UNIFORM_INTERVALS,
            per_decade: MeshSpec::DEFAULT_PER_DECADE,
            tail: TailPolicy::PowerLaw,
        }
    }
}

impl TimeSettings {
    pub fn mesh_spec(&self, tau: f64) -> MeshSpec {
        MeshSpec { split: tau, uniform_intervals: self.uniform_intervals, per_decade: self.per_decade }
    }

    /// Mesh on `[0, horizon_factor·τ]` for data with dispersive time `τ`.
    pub fn mesh_for(&self, g: &Field) -> Result<(f64, TimeMesh)> {
        if !(self.horizon_factor > 1.0) {
            return Err(invalid(format!("horizon factor must exceed 1, got {}", self.horizon_factor)));
        }
        let tau = dispersive_time(g)?;
        let horizon = self.horizon_factor * tau;
        Ok((tau, self.mesh_spec(tau).mesh(0.0, horizon)?))
    }
}

pub(crate) type Coeffs = Vec<Complex64>;

pub(crate) struct Kernel {
    pub grid: Grid,
    pub p: f64,
    pub k2: Vec<f64>,
    pub mesh: TimeMesh,
}

/// Free-data integrand on every node plus the scalar `‖e^{isΔ}g‖_{p+2}^{p+2}`.
pub(crate) struct FreeIntegrand {
    pub g_hat: Coeffs,
    pub g0_hat: Vec<Coeffs>,
    pub lp: Vec<f64>,
    pub tail: Option<TailEstimate>,
    /// Multiplier for the value at the last node that stands in for `∫_T^∞`.
    pub tail_factor: f64,
}

impl Kernel {
    pub fn new(grid: Grid, p: f64, mesh: TimeMesh) -> Self {
        Self { grid, p, k2: grid.wavenumber_sq(), mesh }
    }

    pub fn coefficients(&self, f: &Field) -> Coeffs {
        let mut v = f.values().to_vec();
        dft_raw(&self.grid, &mut v, Direction::Forward);
        let s = 1.0 / self.grid.len() as f64;
        v.iter_mut().for_each(|z| *z *= s);
        v
    }

    pub fn physical(&self, hat: &[Complex64], scale: Complex64) -> Field {
        let mut v = hat.to_vec();
        dft_raw(&self.grid, &mut v, Direction::Inverse);
        v.iter_mut().for_each(|z| *z *= scale);
        Field::from_parts(self.grid, v)
    }

    /// `‖x‖₂` for coefficients `x̂`.
    pub fn l2_norm(&self, hat: &[Complex64]) -> f64 {
        let s: f64 = hat.iter().map(|z| z.norm_sqr()).sum();
        (s * self.grid.len() as f64 * self.grid.cell_volume()).sqrt()
    }

    /// `e^{isΔ}` applied to coefficients, returned as physical samples.
    fn to_physical_at(&self, hat: &[Complex64], s: f64) -> Vec<Complex64> {
        let mut v: Vec<Complex64> =
            hat.iter().zip(&self.k2).map(|(z, k2)| z * Complex64::cis(-k2 * s)).collect();
        dft_raw(&self.grid, &mut v, Direction::Inverse);
        v
    }

    /// Coefficients of `e^{-isΔ} v` for physical `v`, consuming `v`.
    fn pull_back(&self, mut v: Vec<Complex64>, s: f64) -> Coeffs {
        dft_raw(&self.grid, &mut v, Direction::Forward);
        let n = 1.0 / self.grid.len() as f64;
        v.iter_mut().zip(&self.k2).for_each(|(z, k2)| *z *= Complex64::cis(k2 * s) * n);
        v
    }

    pub fn free_integrand(&self, g: &Field, policy: TailPolicy) -> Result<FreeIntegrand> {
        let g_hat = self.coefficients(g);
        let dv = self.grid.cell_volume();
        let (g0_hat, lp): (Vec<Coeffs>, Vec<f64>) = self
            .mesh
            .nodes()
            .par_iter()
            .map(|&s| {
                let mut u = self.to_physical_at(&g_hat, s);
                let mut lp = 0.0;
                for z in u.iter_mut() {
                    lp += modulus_power(*z, self.p) * z.norm_sqr();
                    *z = nonlinearity(*z, self.p);
                }
                (self.pull_back(u, s), lp * dv)
            })
            .unzip();
        let tail = if lp.iter().all(|v| *v == 0.0) {
            None
        } else {
            Some(power_law_tail(self.mesh.nodes(), &lp)?)
        };
        let tail_factor = match (policy, tail) {
            (TailPolicy::PowerLaw, Some(t)) => t.factor,
            _ => 0.0,
        };
        if !wrap_check(g, self.mesh.end()).ok {
            log::warn!("grid may be too small for free transport up to t = {}", self.mesh.end());
        }
        Ok(FreeIntegrand { g_hat, g0_hat, lp, tail, tail_factor })
    }

    /// `e^{-isΔ}[F(e^{isΔ}(g + δ_k)) - F(e^{isΔ}g)]` at every node.
    pub fn difference(&self, g_hat: &[Complex64], delta_hat: &[Coeffs]) -> Vec<Coeffs> {
        self.mesh
            .nodes()
            .par_iter()
            .zip(delta_hat.par_iter())
            .map(|(&s, d)| {
                let b = self.to_physical_at(g_hat, s);
                let w = self.to_physical_at(d, s);
                let diff: Vec<Complex64> =
                    b.iter().zip(&w).map(|(b, w)| nonlinearity_difference(*b, *w, self.p)).collect();
                self.pull_back(diff, s)
            })
            .collect()
    }

    /// Simpson integral over the mesh plus the anchored tail.
    pub fn total(&self, values: &[Coeffs], tail_factor: f64) -> Coeffs {
        let n = self.grid.len();
        let mut acc = vec![Complex64::new(0.0, 0.0); n];
        for (w, v) in self.mesh.weights().iter().zip(values) {
            acc.iter_mut().zip(v).for_each(|(a, z)| *a += z * w);
        }
        if tail_factor != 0.0 {
            let last = values.last().expect("mesh is nonempty");
            acc.iter_mut().zip(last).for_each(|(a, z)| *a += z * tail_factor);
        }
        acc
    }

    /// Running trapezoid integrals from the first node.
    pub fn cumulative(&self, values: &[Coeffs]) -> Vec<Coeffs> {
        let n = self.grid.len();
        let mut out = Vec::with_capacity(values.len());
        let mut acc = vec![Complex64::new(0.0, 0.0); n];
        out.push(acc.clone());
        for (i, hw) in self.mesh.trapezoid_half_widths().iter().enumerate() {
            for ((a, x), y) in acc.iter_mut().zip(&values[i]).zip(&values[i + 1]) {
                *a += (x + y) * hw;
            }
            out.push(acc.clone());
        }
        out
    }
}
