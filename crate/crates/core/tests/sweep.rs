use scatlab::lab::{read_rows, run_scaling_sweep, sweep_field, SweepConfig};
use scatlab::spectral::mass;

const REFERENCE: &str = include_str!("../configs/sweep_d1_p3_j9.toml");

fn reference() -> SweepConfig {
    let mut cfg = SweepConfig::from_toml(REFERENCE).unwrap();
    cfg.output = Default::default();
    cfg
}

#[test]
fn records_match_regime_scalings() {
    let cfg = reference();
    let out = run_scaling_sweep(&cfg, None).unwrap();
    let recs = out.records();
    assert_eq!(recs.len(), 4);
    for r in &recs {
        assert!((r.l2_norm - r.eps).abs() < 1e-6 * r.eps);
        assert!(r.main_dominates);
        assert!(r.eps < 1.0 && r.sigma > 1.0 && r.eps * r.sigma < 1.0);
        for v in [r.l2_norm, r.sigma_norm, r.main_term, r.displacement, r.error_norm, r.sigma_quotient] {
            assert!(v.is_finite() && v >= 0.0);
        }
    }
    let pairs: Vec<(f64, f64)> = recs.iter().map(|r| (r.sigma, r.main_term / r.eps.powi(5))).collect();
    let fit = scatlab::fit::fit_power_law(&pairs).unwrap();
    assert!((fit.slope - 0.5).abs() < 1e-6, "{}", fit.slope);
}

#[test]
fn sampled_family_has_requested_mass() {
    let cfg = reference();
    for pt in cfg.points() {
        let f = sweep_field(&cfg, pt).unwrap();
        assert!((mass(&f).sqrt() / pt.eps - 1.0).abs() < 1e-12);
    }
}

#[test]
fn failed_points_become_rows() {
    let mut cfg = reference();
    // the σ = 2 point needs more sweeps than the others
    cfg.settings.max_iter = 2;
    let mut buf = Vec::new();
    let out = run_scaling_sweep(&cfg, Some(&mut buf)).unwrap();
    let rows = read_rows(buf.as_slice()).unwrap();
    assert_eq!(rows.len(), cfg.sigmas.len());
    assert_eq!(rows.iter().map(|r| r.sigma).collect::<Vec<_>>(), cfg.sigmas);
    let failed: Vec<_> = rows.iter().filter(|r| r.status == "failed").collect();
    assert!(!failed.is_empty() && failed.len() < rows.len());
    assert!(failed.iter().all(|r| !r.reason.is_empty() && r.displacement.is_none()));
    assert_eq!(out.failures().len(), failed.len());
}
