use serde::Serialize;

use super::config::SweepConfig;
use super::sweep::SweepRecord;
use crate::error::{Error, Result};
use crate::exponents::{l2_quotient_growth_exponent, quotient_growth_exponent};
use crate::fit::{fit_power_law, FitResult};

/// Relative slope tolerance for agreement with the predicted exponent.
pub const SLOPE_TOLERANCE: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "norm", rename_all = "lowercase")]
pub enum QuotientKind {
    /// `‖T(φ)-φ‖₂ / ‖φ‖_Σ^s`.
    Sigma { s: f64 },
    /// `‖T(φ)-φ‖₂ / ‖φ‖₂^{1+β}`.
    L2 { beta: f64 },
}

impl QuotientKind {
    pub fn value(&self, r: &SweepRecord) -> f64 {
        match *self {
            QuotientKind::Sigma { s } => r.displacement / r.sigma_norm.powf(s),
            QuotientKind::L2 { beta } => r.displacement / r.l2_norm.powf(1.0 + beta),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Trend {
    Increasing,
    Decreasing,
    Mixed,
}

#[derive(Debug, Clone, Serialize)]
pub struct QuotientTest {
    pub kind: QuotientKind,
    pub j: f64,
    pub sigmas: Vec<f64>,
    pub quotients: Vec<f64>,
    pub predicted_slope: f64,
    pub fit: FitResult,
    pub trend: Trend,
    /// Fitted slope within [`SLOPE_TOLERANCE`] of the prediction.
    pub slope_agrees: bool,
    /// Quotient increases along the sweep.
    pub blowup: bool,
    /// Slope agrees and the trend follows the sign of the prediction.
    pub verdict: bool,
}

/// Fits the quotient against σ and compares with the predicted growth rate
/// `j[s-(p+1)] + 2 - dp/2 - s` (Σ) or `j(β-p) + 2 - dp/2` (L²).
pub fn quotient_blowup_test(cfg: &SweepConfig, records: &[SweepRecord], kind: QuotientKind) -> Result<QuotientTest> {
    if records.len() < cfg.sigmas.len() {
        return Err(Error::Precondition(format!(
            "sweep incomplete: {} of {} points succeeded",
            records.len(),
            cfg.sigmas.len()
        )));
    }
    let predicted = match kind {
        QuotientKind::Sigma { s } => quotient_growth_exponent(cfg.params, s, cfg.j)?,
        QuotientKind::L2 { beta } => l2_quotient_growth_exponent(cfg.params, beta, cfg.j)?,
    };
    let sigmas: Vec<f64> = records.iter().map(|r| r.sigma).collect();
    let quotients: Vec<f64> = records.iter().map(|r| kind.value(r)).collect();
    let pairs: Vec<(f64, f64)> = sigmas.iter().copied().zip(quotients.iter().copied()).collect();
    let fit = fit_power_law(&pairs)?;
    let trend = if quotients.windows(2).all(|w| w[1] > w[0]) {
        Trend::Increasing
    } else if quotients.windows(2).all(|w| w[1] < w[0]) {
        Trend::Decreasing
    } else {
        Trend::Mixed
    };
    let slope_agrees = (fit.slope - predicted).abs() <= SLOPE_TOLERANCE * predicted.abs();
    let expected_trend = if predicted > 0.0 { Trend::Increasing } else { Trend::Decreasing };
    Ok(QuotientTest {
        kind,
        j: cfg.j,
        sigmas,
        quotients,
        predicted_slope: predicted,
        fit,
        trend,
        slope_agrees,
        blowup: trend == Trend::Increasing,
        verdict: slope_agrees && trend == expected_trend,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents::PhysParams;

    fn synthetic(cfg: &SweepConfig) -> Vec<SweepRecord> {
        // exact asymptotic scalings of the regime
        cfg.points()
            .iter()
            .map(|pt| {
                let (eps, sigma) = (pt.eps, pt.sigma);
                SweepRecord {
                    eps,
                    sigma,
                    l2_norm: eps,
                    sigma_norm: eps * sigma,
                    main_term: eps.powi(5) * sigma.sqrt(),
                    displacement: eps.powi(4) * sigma.sqrt(),
                    born_norm: eps.powi(4) * sigma.sqrt(),
                    error_norm: 0.0,
                    sigma_quotient: 0.0,
                    l2_quotient: 0.0,
                    main_dominates: true,
                    iterations: 1,
                    tail_fraction: 0.0,
                    grid_points: 1,
                    box_length: 1.0,
                }
            })
            .collect()
    }

    fn cfg() -> SweepConfig {
        SweepConfig {
            params: PhysParams::new(1, 3.0).unwrap(),
            profile: Default::default(),
            j: 9.0,
            sigmas: vec![2.0, 4.0, 8.0, 16.0],
            s: 4.5,
            beta: 3.0,
            map: crate::scattering::MapKind::Scattering,
            settings: Default::default(),
            output: Default::default(),
        }
    }

    #[test]
    fn exact_scalings_reproduce_predictions() {
        let cfg = cfg();
        let recs = synthetic(&cfg);
        let above = quotient_blowup_test(&cfg, &recs, QuotientKind::Sigma { s: 4.5 }).unwrap();
        assert!((above.fit.slope - 0.5).abs() < 1e-10 && above.verdict && above.blowup);
        let critical = quotient_blowup_test(&cfg, &recs, QuotientKind::Sigma { s: 4.0 }).unwrap();
        assert!((critical.predicted_slope + 3.5).abs() < 1e-12);
        assert!(critical.verdict && !critical.blowup);
        let l2 = quotient_blowup_test(&cfg, &recs, QuotientKind::L2 { beta: 3.0 }).unwrap();
        assert!((l2.fit.slope - 0.5).abs() < 1e-10 && l2.verdict);
    }

    #[test]
    fn incomplete_sweep_is_rejected() {
        let cfg = cfg();
        let recs = synthetic(&cfg);
        assert!(quotient_blowup_test(&cfg, &recs[..3], QuotientKind::Sigma { s: 4.5 }).is_err());
    }
}
