use num_complex::Complex64;
use serde::Serialize;

use super::strang::Trajectory;
use crate::error::{invalid, Error, Result};
use crate::fit::{fit_power_law, FitResult};
use crate::spectral::fourier::{dft_raw, Direction};
use crate::spectral::{energy, lp_power, mass, Field};

/// Quantities of the pseudoconformal energy estimate at one sample time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PcfSample {
    pub t: f64,
    pub mass: f64,
    pub energy: f64,
    /// `e(t) = ‖J(t)u‖₂² + U(t)`.
    pub e: f64,
    /// `U(t) = 8t²/(p+2) ‖u‖_{p+2}^{p+2}`.
    pub u_term: f64,
    /// `‖J(t)u‖₂²` with `J(t) = x + 2it∇`.
    pub j_norm_sq: f64,
    /// `‖u(t)‖_{p+2}^{p+2}`.
    pub lp_power: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConservationReport {
    pub mass_drift: f64,
    pub energy_drift: f64,
    pub samples: Vec<PcfSample>,
    /// Power-law fit of `‖u(t)‖_{p+2}^{p+2}` over samples with `t >= 1`.
    pub decay_fit: Option<FitResult>,
    /// Expected decay exponent `-dp/2`.
    pub expected_decay: f64,
    /// Largest relative gap between the increment of `e(t)` over adjacent
    /// samples and the trapezoid integral of `(2 - dp/2) U(t)/t`; `None`
    /// for linear runs or too few samples.
    pub edot_residual: Option<f64>,
    /// `U(t) <= e(t)` at every sample.
    pub gronwall_consistent: bool,
}

/// `‖(x + 2it∇)u‖₂²`.
pub fn j_norm_sq(u: &Field, t: f64) -> f64 {
    let g = u.grid();
    let n = g.points_per_axis();
    let d = g.dim() as usize;
    let mut hat = u.values().to_vec();
    dft_raw(g, &mut hat, Direction::Forward);
    let ks = g.wavenumbers();
    let xs = g.coords();
    let scale = 1.0 / g.len() as f64;
    let mut total = 0.0;
    for axis in 0..d {
        let mut grad: Vec<Complex64> = hat
            .iter()
            .enumerate()
            .map(|(idx, z)| {
                let m = if d == 1 { idx } else if axis == 0 { idx / n } else { idx % n };
                z * Complex64::new(0.0, ks[m] * scale)
            })
            .collect();
        dft_raw(g, &mut grad, Direction::Inverse);
        total += u
            .values()
            .iter()
            .zip(&grad)
            .enumerate()
            .map(|(idx, (v, dv))| {
                let j = if d == 1 { idx } else if axis == 0 { idx / n } else { idx % n };
                (v * xs[j] + Complex64::new(0.0, 2.0 * t) * dv).norm_sqr()
            })
            .sum::<f64>();
    }
    total * g.cell_volume()
}

/// Mass and energy drift plus `e(t)`, `U(t)`, `‖J(t)u‖₂²` and
/// `‖u(t)‖_{p+2}^{p+2}` along a trajectory, with the decay fit on `[1, T]`.
pub fn pseudoconformal_report(traj: &Trajectory) -> Result<ConservationReport> {
    if traj.snapshots.is_empty() {
        return Err(invalid("empty trajectory"));
    }
    let params = traj.config.params;
    let p = params.p;
    let samples: Vec<PcfSample> = traj
        .snapshots
        .iter()
        .map(|(t, u)| {
            let lp = lp_power(u, p + 2.0);
            let jn = j_norm_sq(u, *t);
            let u_term = 8.0 * t * t / (p + 2.0) * lp;
            PcfSample {
                t: *t,
                mass: mass(u),
                energy: energy(u, p),
                e: jn + u_term,
                u_term,
                j_norm_sq: jn,
                lp_power: lp,
            }
        })
        .collect();

    let (m0, e0) = (samples[0].mass, samples[0].energy);
    let rel = |a: f64, b: f64| if b != 0.0 { ((a - b) / b).abs() } else { (a - b).abs() };
    let mass_drift = samples.iter().map(|s| rel(s.mass, m0)).fold(0.0, f64::max);
    let energy_drift = samples.iter().map(|s| rel(s.energy, e0)).fold(0.0, f64::max);

    let late: Vec<(f64, f64)> =
        samples.iter().filter(|s| s.t >= 1.0 && s.lp_power > 0.0).map(|s| (s.t, s.lp_power)).collect();
    let decay_fit = match late.as_slice() {
        [first, .., last] if last.0 / first.0 >= 10.0 * (1.0 - 1e-12) => Some(fit_power_law(&late)?),
        _ => None,
    };

    let edot_residual = if traj.config.nonlinear && samples.len() >= 2 {
        let c = params.scaling_exponent();
        let rate = |s: &PcfSample| if s.t > 0.0 { c * s.u_term / s.t } else { 0.0 };
        samples
            .windows(2)
            .map(|w| {
                let de = w[1].e - w[0].e;
                let predicted = 0.5 * (rate(&w[0]) + rate(&w[1])) * (w[1].t - w[0].t);
                if predicted == 0.0 { de.abs() } else { ((de - predicted) / predicted).abs() }
            })
            .fold(None, |acc: Option<f64>, r| Some(acc.map_or(r, |a| a.max(r))))
    } else {
        None
    };

    let gronwall_consistent = samples.iter().all(|s| s.u_term <= s.e && s.u_term >= 0.0);
    Ok(ConservationReport {
        mass_drift,
        energy_drift,
        samples,
        decay_fit,
        expected_decay: -params.decay_rate(),
        edot_residual,
        gronwall_consistent,
    })
}

/// Decay fit that insists on at least one decade of samples in `[1, T]`.
pub fn require_decay_fit(report: &ConservationReport) -> Result<FitResult> {
    report
        .decay_fit
        .ok_or_else(|| Error::Fit("decay fit needs at least one decade of sample times in [1, T]".into()))
}

/// `{t_start · 10^{i/per_decade}}` up to `t_end`, with `t_end` included.
pub fn log_sample_times(t_start: f64, t_end: f64, per_decade: usize) -> Vec<f64> {
    let n = ((t_end / t_start).log10() * per_decade as f64).round().max(1.0) as usize;
    let step = (t_end / t_start).ln() / n as f64;
    (0..=n).map(|i| if i == n { t_end } else { t_start * (i as f64 * step).exp() }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{evolve, SolverConfig};
    use crate::exponents::PhysParams;
    use crate::spectral::Profile;

    fn run(nonlinear: bool, t_end: f64) -> ConservationReport {
        let prof = Profile::Gaussian { width: 1.0 };
        let g = prof.grid_for(1, 1.0, t_end).unwrap();
        let f = prof.unit_mass(g).scale(0.3);
        let mut times = vec![0.0];
        times.extend(log_sample_times(0.1, t_end, 16));
        let mut cfg = SolverConfig::new(PhysParams::new(1, 3.0).unwrap(), g, 0.005, t_end).with_samples(times);
        cfg.nonlinear = nonlinear;
        pseudoconformal_report(&evolve(&f, &cfg).unwrap()).unwrap()
    }

    #[test]
    fn linear_flow_keeps_j_norm() {
        let r = run(false, 4.0);
        let j0 = r.samples[0].j_norm_sq;
        for s in &r.samples {
            assert!(((s.j_norm_sq - j0) / j0).abs() < 1e-10, "t = {}", s.t);
        }
        assert!(r.edot_residual.is_none());
    }

    #[test]
    fn edot_identity_and_gronwall() {
        let r = run(true, 4.0);
        assert!(r.gronwall_consistent);
        assert!(r.edot_residual.unwrap() < 2e-2, "{:?}", r.edot_residual);
        assert!(r.decay_fit.is_none());
        assert!(require_decay_fit(&r).is_err());
    }

    #[test]
    fn sample_times_per_decade() {
        let t = log_sample_times(1.0, 100.0, 16);
        assert_eq!(t.len(), 33);
        assert_eq!(t[0], 1.0);
        assert_eq!(*t.last().unwrap(), 100.0);
        assert!((t[16] - 10.0).abs() < 1e-12);
    }
}
