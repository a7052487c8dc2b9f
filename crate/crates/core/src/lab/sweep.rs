use std::collections::BTreeMap;
use std::io::Write;
use std::sync::mpsc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{SweepConfig, SweepPoint};
use super::manifest::config_hash;
use crate::error::{Error, Result};
use crate::scattering::expansion_error;
use crate::spectral::{dispersive_time, mass, Field};

/// Measurements at one sweep point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub eps: f64,
    pub sigma: f64,
    pub l2_norm: f64,
    pub sigma_norm: f64,
    /// `‖e^{itΔ}φ‖_{p+2,p+2}^{p+2}`.
    pub main_term: f64,
    pub displacement: f64,
    pub born_norm: f64,
    pub error_norm: f64,
    /// `‖T(φ)-φ‖₂ / ‖φ‖_Σ^s`.
    pub sigma_quotient: f64,
    /// `‖T(φ)-φ‖₂ / ‖φ‖₂^{1+β}`.
    pub l2_quotient: f64,
    /// `main_term / ‖φ‖₂ > ‖e(φ)‖₂`.
    pub main_dominates: bool,
    pub iterations: usize,
    pub tail_fraction: f64,
    pub grid_points: usize,
    pub box_length: f64,
}

/// One CSV row; failed points keep their coordinates and the reason.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub eps: f64,
    pub sigma: f64,
    pub status: String,
    pub l2_norm: Option<f64>,
    pub sigma_norm: Option<f64>,
    pub main_term: Option<f64>,
    pub displacement: Option<f64>,
    pub born_norm: Option<f64>,
    pub error_norm: Option<f64>,
    pub sigma_quotient: Option<f64>,
    pub l2_quotient: Option<f64>,
    pub main_dominates: Option<bool>,
    pub iterations: Option<usize>,
    pub tail_fraction: Option<f64>,
    pub grid_points: Option<usize>,
    pub box_length: Option<f64>,
    pub reason: String,
    pub config_hash: String,
}

impl SweepRow {
    fn new(point: SweepPoint, result: &Result<SweepRecord>, hash: &str) -> Self {
        let r = result.as_ref().ok();
        SweepRow {
            eps: point.eps,
            sigma: point.sigma,
            status: if r.is_some() { "ok".into() } else { "failed".into() },
            l2_norm: r.map(|r| r.l2_norm),
            sigma_norm: r.map(|r| r.sigma_norm),
            main_term: r.map(|r| r.main_term),
            displacement: r.map(|r| r.displacement),
            born_norm: r.map(|r| r.born_norm),
            error_norm: r.map(|r| r.error_norm),
            sigma_quotient: r.map(|r| r.sigma_quotient),
            l2_quotient: r.map(|r| r.l2_quotient),
            main_dominates: r.map(|r| r.main_dominates),
            iterations: r.map(|r| r.iterations),
            tail_fraction: r.map(|r| r.tail_fraction),
            grid_points: r.map(|r| r.grid_points),
            box_length: r.map(|r| r.box_length),
            reason: result.as_ref().err().map(|e| e.to_string()).unwrap_or_default(),
            config_hash: hash.to_string(),
        }
    }
}

#[derive(Debug)]
pub struct SweepOutcome {
    pub points: Vec<SweepPoint>,
    pub results: Vec<Result<SweepRecord>>,
    /// Wall-clock seconds per point.
    pub timings: Vec<f64>,
}

impl SweepOutcome {
    /// Successful records in σ order.
    pub fn records(&self) -> Vec<SweepRecord> {
        self.results.iter().filter_map(|r| r.as_ref().ok().cloned()).collect()
    }

    pub fn failures(&self) -> Vec<(SweepPoint, &Error)> {
        self.points
            .iter()
            .zip(&self.results)
            .filter_map(|(p, r)| r.as_ref().err().map(|e| (*p, e)))
            .collect()
    }

    pub fn timing_map(&self) -> BTreeMap<String, f64> {
        self.points.iter().zip(&self.timings).map(|(p, t)| (format!("sigma={}", p.sigma), *t)).collect()
    }
}

/// `φ_{ε,σ}` sampled on a grid sized for its free evolution over the
/// configured horizon.
pub fn sweep_field(cfg: &SweepConfig, point: SweepPoint) -> Result<Field> {
    let d = cfg.params.d;
    let coarse = cfg.profile.grid_for(d, point.sigma, 0.0)?;
    let tau = dispersive_time(&cfg.profile.sample(coarse, 1.0, point.sigma))?;
    let grid = cfg.profile.grid_for(d, point.sigma, cfg.settings.time.horizon_factor * tau)?;
    let f = cfg.profile.sample(grid, 1.0, point.sigma);
    Ok(f.scale(point.eps / mass(&f).sqrt()))
}

/// Measures one point of the sweep.
pub fn evaluate_point(cfg: &SweepConfig, point: SweepPoint) -> Result<SweepRecord> {
    let phi = sweep_field(cfg, point)?;
    let rep = expansion_error(&phi, cfg.params, cfg.map, &cfg.settings, None)?;
    let grid = *phi.grid();
    let main_term = rep.solution.free_spacetime;
    Ok(SweepRecord {
        eps: point.eps,
        sigma: point.sigma,
        l2_norm: rep.l2_norm,
        sigma_norm: rep.sigma_norm,
        main_term,
        displacement: rep.displacement_norm,
        born_norm: rep.born_norm,
        error_norm: rep.error_norm,
        sigma_quotient: rep.displacement_norm / rep.sigma_norm.powf(cfg.s),
        l2_quotient: rep.displacement_norm / rep.l2_norm.powf(1.0 + cfg.beta),
        main_dominates: main_term / rep.l2_norm > rep.error_norm,
        iterations: rep.convergence.iterations,
        tail_fraction: rep.convergence.tail_fraction,
        grid_points: grid.points_per_axis(),
        box_length: grid.length(),
    })
}

/// Runs every point of the sweep on the rayon pool. Rows are written to
/// `sink` in σ order as soon as all earlier points have finished; a failed
/// point becomes a `failed` row and the sweep continues.
pub fn run_scaling_sweep(cfg: &SweepConfig, sink: Option<&mut dyn Write>) -> Result<SweepOutcome> {
    cfg.validate()?;
    let points = cfg.points();
    let hash = config_hash(cfg);
    let mut writer = sink.map(csv::Writer::from_writer);
    let mut results: Vec<Option<(Result<SweepRecord>, f64)>> = (0..points.len()).map(|_| None).collect();
    let mut written = 0;
    let (tx, rx) = mpsc::channel();
    std::thread::scope(|scope| -> Result<()> {
        let pts = &points;
        scope.spawn(move || {
            pts.par_iter().enumerate().for_each_with(tx, |tx, (i, pt)| {
                let start = Instant::now();
                let r = evaluate_point(cfg, *pt);
                if let Err(e) = &r {
                    log::warn!("sweep point σ = {} failed: {e}", pt.sigma);
                }
                let _ = tx.send((i, r, start.elapsed().as_secs_f64()));
            });
        });
        for (i, r, secs) in rx {
            results[i] = Some((r, secs));
            while written < points.len() {
                let Some((r, _)) = &results[written] else { break };
                if let Some(w) = writer.as_mut() {
                    w.serialize(SweepRow::new(points[written], r, &hash))?;
                    w.flush()?;
                }
                written += 1;
            }
        }
        Ok(())
    })?;
    let (results, timings) = results.into_iter().map(|r| r.expect("every point reports")).unzip();
    Ok(SweepOutcome { points, results, timings })
}

/// Reads rows written by [`run_scaling_sweep`].
pub fn read_rows<R: std::io::Read>(reader: R) -> Result<Vec<SweepRow>> {
    let mut rdr = csv::Reader::from_reader(reader);
    rdr.deserialize().map(|r| r.map_err(Error::from)).collect()
}
