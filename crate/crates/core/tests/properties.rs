use num_complex::Complex64;
use proptest::prelude::*;

use scatlab::dynamics::{evolve, SolverConfig};
use scatlab::exponents::{
    beta_threshold, canonical_q, is_admissible_pair, quotient_growth_exponent, sharpened_q, strauss_exponent,
    unsharpened_q, Exponent, PhysParams,
};
use scatlab::lab::{geometric_amplitudes, holder_probe, HolderTarget, HolderVerdict};
use scatlab::scattering::{expansion_error, scattering_state, MapKind, MapSettings};
use scatlab::spectral::{energy, fourier_transform, mass, scale_family, Direction, Field, FreeFlow, Grid, Profile};

fn scattering_params() -> impl Strategy<Value = PhysParams> {
    (1u32..=3, 0.02f64..0.98).prop_map(|(d, u)| {
        let lo = strauss_exponent(d).unwrap();
        let hi = 4.0 / d as f64;
        PhysParams::new(d, lo + u * (hi - lo)).unwrap()
    })
}

/// Sum of three modulated Gaussians with random centres, widths and phases.
fn smooth_field(n: usize) -> impl Strategy<Value = Field> {
    prop::collection::vec((-3.0f64..3.0, 0.7f64..1.5, -2.0f64..2.0, -1.0f64..1.0, -1.0f64..1.0), 3).prop_map(
        move |bumps| {
            let g = Grid::new(1, n, 40.0).unwrap();
            Field::from_fn(g, |x| {
                bumps
                    .iter()
                    .map(|&(c, w, k, a, b)| {
                        let y = (x[0] - c) / w;
                        Complex64::new(a, b) * (-y * y).exp() * Complex64::cis(k * x[0])
                    })
                    .sum()
            })
        },
    )
}

fn l2_dist(a: &Field, b: &Field) -> f64 {
    mass(&a.sub(b).unwrap()).sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn strauss_exponent_is_root_below_mass_critical(d in 1u32..=8) {
        let a = strauss_exponent(d).unwrap();
        let df = d as f64;
        prop_assert!(a > 0.0 && a < 4.0 / df);
        prop_assert!((df * a * a + (df - 2.0) * a - 4.0).abs() < 1e-12);
    }

    #[test]
    fn canonical_pair_is_admissible(params in scattering_params()) {
        let q = canonical_q(params).unwrap();
        prop_assert!(is_admissible_pair(params.d, Exponent::Finite(q), Exponent::Finite(params.p + 2.0)));
    }

    #[test]
    fn sharpened_exponent_reduces_at_unit_corner(params in scattering_params()) {
        let q = sharpened_q(params, 1.0, 1.0).unwrap();
        prop_assert!((q - unsharpened_q(params)).abs() < 1e-12);
    }

    #[test]
    fn growth_exponent_is_affine(params in scattering_params(), s in 0.5f64..8.0, j in 1.5f64..12.0, h in 0.1f64..2.0) {
        let f = |s: f64, j: f64| quotient_growth_exponent(params, s, j).unwrap();
        prop_assert!((f(s + 2.0 * h, j) - 2.0 * f(s + h, j) + f(s, j)).abs() < 1e-9);
        prop_assert!((f(s, j + 2.0 * h) - 2.0 * f(s, j + h) + f(s, j)).abs() < 1e-9);
    }

    #[test]
    fn beta_threshold_below_p_and_increasing(params in scattering_params(), j in 1.1f64..50.0) {
        prop_assume!(params.dim() * params.p < 4.0);
        let b = beta_threshold(params, j).unwrap();
        prop_assert!(b < params.p);
        prop_assert!(beta_threshold(params, 1.5 * j).unwrap() > b);
    }

    #[test]
    fn free_flow_is_unitary_group(f in smooth_field(256), t in -3.0f64..3.0, s in -3.0f64..3.0) {
        let flow = FreeFlow::new(*f.grid());
        let norm = mass(&f).sqrt();
        let u = flow.propagate(&f, t);
        prop_assert!((mass(&u).sqrt() - norm).abs() < 1e-10 * norm.max(1.0));
        prop_assert!(l2_dist(&flow.propagate(&u, -t), &f) < 1e-10 * norm.max(1.0));
        let composed = flow.propagate(&u, s);
        prop_assert!(l2_dist(&composed, &flow.propagate(&f, t + s)) < 1e-10 * norm.max(1.0));
    }

    #[test]
    fn fourier_transform_is_isometric(f in smooth_field(128)) {
        let hat = fourier_transform(&f, Direction::Forward).unwrap();
        let (a, b) = (mass(&f), mass(&hat));
        prop_assert!((a - b).abs() < 1e-12 * a.max(1.0));
        let back = fourier_transform(&hat, Direction::Inverse).unwrap();
        prop_assert!(l2_dist(&back, &f) < 1e-12 * a.sqrt().max(1.0));
    }
}

struct Polynomial(Vec<f64>);

impl HolderTarget for Polynomial {
    fn base_tag(&self) -> String {
        "0".into()
    }
    fn direction_tag(&self) -> String {
        "1".into()
    }
    fn increment(&self, e: f64) -> scatlab::Result<Vec<Complex64>> {
        let v: f64 = self.0.iter().enumerate().map(|(k, c)| c * e.powi(k as i32 + 1)).sum();
        Ok(vec![Complex64::new(v, 0.0)])
    }
    fn norm(&self, v: &[Complex64]) -> f64 {
        v[0].norm()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn scale_family_obeys_scaling_laws(eps in 0.01f64..1.0, sigma in 0.7f64..2.5) {
        let prof = Profile::Gaussian { width: 1.0 };
        let g = Grid::sized_for(1, 2.5 * prof.support_radius(), prof.spectral_radius() / 0.7, prof.travel_wavenumber(), 0.0)
            .unwrap();
        let base = prof.unit_mass(g);
        let scaled = scale_family(&base, eps, sigma).unwrap();
        prop_assert!((mass(&scaled).sqrt() / eps - 1.0).abs() < 1e-6);
        let direct = prof.sample(g, 1.0, sigma).scale(eps / mass(&prof.sample(g, 1.0, 1.0)).sqrt());
        prop_assert!(l2_dist(&scaled, &direct) < 1e-6 * eps);
    }

    #[test]
    fn polynomials_are_members_up_to_degree(
        coeffs in prop::collection::vec((0.2f64..2.0, any::<bool>()), 1..=4),
        frac in 0.0f64..1.0,
    ) {
        let c: Vec<f64> = coeffs.iter().map(|&(m, neg)| if neg { -m } else { m }).collect();
        let k = c.len() as f64;
        let eps = geometric_amplitudes(0.1, 2f64.sqrt(), 12);
        let target = Polynomial(c);
        let s = 1.0 + frac * (k - 1.0);
        prop_assert_eq!(holder_probe(&target, s, &eps).unwrap().verdict, HolderVerdict::Membership);
        let top = holder_probe(&target, k, &eps).unwrap();
        prop_assert_eq!(top.verdict, HolderVerdict::Membership);
        prop_assert_eq!(top.remainder_exponent, Exponent::Infinity);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn lower_bound_chain_holds_for_small_data(eps in 0.005f64..0.1, wave in any::<bool>()) {
        let params = PhysParams::new(1, 3.0).unwrap();
        let prof = Profile::Gaussian { width: 1.0 };
        let g = prof.grid_for(1, 1.0, 40.0).unwrap();
        let kind = if wave { MapKind::Wave } else { MapKind::Scattering };
        let r = expansion_error(&prof.unit_mass(g).scale(eps), params, kind, &MapSettings::default(), None).unwrap();
        prop_assert!(r.lower_bounds.displacement_bound && r.lower_bounds.born_bound);
        prop_assert!(r.reconstruction_residual < 1e-10);
    }

    #[test]
    fn defocusing_energy_is_conserved(amp in 0.2f64..1.5, p in 1.5f64..4.0) {
        let params = PhysParams::new(1, p).unwrap();
        let prof = Profile::Gaussian { width: 1.0 };
        let g = prof.grid_for(1, 1.0, 4.0).unwrap();
        let phi = prof.unit_mass(g).scale(amp);
        let traj = evolve(&phi, &SolverConfig::new(params, g, 2e-3, 4.0)).unwrap();
        let e0 = energy(&phi, p);
        let (_, u) = traj.last();
        prop_assert!(e0 > 0.0);
        prop_assert!((energy(u, p) - e0).abs() < 1e-4 * e0);
        prop_assert!((mass(u) - mass(&phi)).abs() < 1e-11 * mass(&phi));
    }
}

#[test]
fn cauchy_increments_shrink_for_small_data() {
    let params = PhysParams::new(1, 3.0).unwrap();
    let prof = Profile::Gaussian { width: 1.0 };
    let g = prof.grid_for(1, 1.0, 160.0).unwrap();
    let cfg = SolverConfig::new(params, g, 0.02, 10.0);
    let st = scattering_state(&prof.unit_mass(g).scale(0.5), &cfg, 5e-4, 4);
    let incs = match st {
        Ok(s) => s.meta.increments,
        Err(scatlab::Error::NotContracting(msg)) => panic!("stalled: {msg}"),
        Err(e) => panic!("{e}"),
    };
    assert!(incs.len() >= 3, "{incs:?}");
    assert!(incs.windows(2).all(|w| w[1] < w[0]), "{incs:?}");
}
