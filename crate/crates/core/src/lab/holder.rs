use num_complex::Complex64;
use serde::Serialize;

use crate::error::{precondition, Result};
use crate::exponents::{Exponent, PhysParams};
use crate::fit::{fit_power_law, FitResult};
use crate::scattering::{solve_map, MapKind, MapSettings};
use crate::spectral::{mass, sigma_norm, Field};

/// Smallest amplitudes used to extract each coefficient.
const EXTRACTION_POINTS: usize = 4;
/// Half-width of the exponent window that decides whether a coefficient
/// of order j is present.
const ORDER_WINDOW: f64 = 0.25;
/// Remainders below this fraction of the increment scale count as zero.
const ZERO_REMAINDER: f64 = 1e-10;
/// Largest relative coefficient change accepted under halving `ε_min`.
const STABILITY_LIMIT: f64 = 0.05;
/// Relative slack on `remainder exponent ≥ s` for the membership verdict.
const VERDICT_SLACK: f64 = 0.05;

/// A map probed along `x₀ + εh`.
pub trait HolderTarget: Sync {
    fn base_tag(&self) -> String;
    fn direction_tag(&self) -> String;
    /// `G(x₀ + εh) - G(x₀)` for `ε` of either sign.
    fn increment(&self, eps: f64) -> Result<Vec<Complex64>>;
    fn norm(&self, v: &[Complex64]) -> f64;
}

/// Scalar map `x ↦ x + x|x|^p` at `x₀ = 0`, `h = 1`.
#[derive(Debug, Clone, Copy)]
pub struct ScalarModel {
    pub p: f64,
}

impl HolderTarget for ScalarModel {
    fn base_tag(&self) -> String {
        "0".into()
    }

    fn direction_tag(&self) -> String {
        "1".into()
    }

    fn increment(&self, eps: f64) -> Result<Vec<Complex64>> {
        Ok(vec![Complex64::new(eps + eps * eps.abs().powf(self.p), 0.0)])
    }

    fn norm(&self, v: &[Complex64]) -> f64 {
        v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// `S` or `W` at `x₀ = 0` along a direction normalized in Σ, measured in L².
#[derive(Debug, Clone)]
pub struct MapTarget {
    pub params: PhysParams,
    pub kind: MapKind,
    pub direction: Field,
    pub settings: MapSettings,
    pub tag: String,
}

impl MapTarget {
    pub fn new(params: PhysParams, kind: MapKind, h: &Field, settings: MapSettings, tag: &str) -> Result<Self> {
        let s = sigma_norm(h);
        if s == 0.0 {
            return Err(precondition("probe direction must be nonzero"));
        }
        Ok(MapTarget { params, kind, direction: h.scale(1.0 / s), settings, tag: tag.to_string() })
    }
}

impl HolderTarget for MapTarget {
    fn base_tag(&self) -> String {
        "0".into()
    }

    fn direction_tag(&self) -> String {
        self.tag.clone()
    }

    fn increment(&self, eps: f64) -> Result<Vec<Complex64>> {
        let sol = solve_map(&self.direction.scale(eps), self.params, self.kind, &self.settings)?;
        Ok(sol.image.into_values())
    }

    fn norm(&self, v: &[Complex64]) -> f64 {
        let g = *self.direction.grid();
        mass(&Field::new(g, v.to_vec()).expect("increment lives on the probe grid")).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum HolderVerdict {
    /// Remainder decays at least like `ε^s`.
    Membership,
    /// Remainder decays strictly slower than `ε^s`.
    Breakdown,
}

#[derive(Debug, Clone, Serialize)]
pub struct HolderFit {
    pub base: String,
    pub direction: String,
    pub s: f64,
    /// `⌊s⌋`.
    pub degree: usize,
    /// Norms of the extracted `a_1 … a_k`, `k ≤ degree`.
    pub coefficient_norms: Vec<f64>,
    #[serde(skip)]
    pub coefficients: Vec<Vec<Complex64>>,
    /// Order at which the expansion stopped (`degree` when complete).
    pub orders_extracted: usize,
    /// Decay exponent of the remainder; infinite when it vanishes.
    pub remainder_exponent: Exponent,
    pub remainder_fit: Option<FitResult>,
    /// Largest relative coefficient change after adding `ε_min/2`.
    pub stability: f64,
    pub stable: bool,
    pub verdict: HolderVerdict,
}

struct Samples {
    eps: Vec<f64>,
    plus: Vec<Vec<Complex64>>,
    minus: Vec<Vec<Complex64>>,
}

struct Extraction {
    coefficients: Vec<Vec<Complex64>>,
    orders: usize,
    remainder_exponent: Exponent,
    remainder_fit: Option<FitResult>,
}

fn axpy(y: &mut [Complex64], a: f64, x: &[Complex64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Lagrange extrapolation to `x = 0` through `(x_i, y_i)`.
fn extrapolate_to_zero(xs: &[f64], ys: &[Vec<Complex64>]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); ys[0].len()];
    for (i, y) in ys.iter().enumerate() {
        let w: f64 = xs
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != i)
            .map(|(_, xk)| xk / (xk - xs[i]))
            .product();
        axpy(&mut out, w, y);
    }
    out
}

fn remainders(s: &Samples, coeffs: &[Vec<Complex64>]) -> (Vec<Vec<Complex64>>, Vec<Vec<Complex64>>) {
    let strip = |e: f64, v: &Vec<Complex64>| {
        let mut r = v.clone();
        for (j, a) in coeffs.iter().enumerate() {
            axpy(&mut r, -e.powi(j as i32 + 1), a);
        }
        r
    };
    let plus = s.eps.iter().zip(&s.plus).map(|(e, v)| strip(*e, v)).collect();
    let minus = s.eps.iter().zip(&s.minus).map(|(e, v)| strip(-*e, v)).collect();
    (plus, minus)
}

fn extract(t: &dyn HolderTarget, s: &Samples, degree: usize) -> Result<Extraction> {
    // ascending ε; the smallest points extract, the rest measure decay
    let scale = s.plus.iter().chain(&s.minus).map(|v| t.norm(v)).fold(0.0, f64::max);
    let held_out = EXTRACTION_POINTS..s.eps.len();
    let mut coefficients: Vec<Vec<Complex64>> = Vec::new();
    for j in 1..=degree + 1 {
        let (rp, rm) = remainders(s, &coefficients);
        let sizes: Vec<f64> = rp.iter().zip(&rm).map(|(a, b)| t.norm(a).max(t.norm(b))).collect();
        if sizes.iter().all(|r| *r <= ZERO_REMAINDER * scale) {
            return Ok(Extraction {
                orders: coefficients.len(),
                coefficients,
                remainder_exponent: Exponent::Infinity,
                remainder_fit: None,
            });
        }
        let pairs: Vec<(f64, f64)> = held_out.clone().map(|i| (s.eps[i], sizes[i])).collect();
        let fit = fit_power_law(&pairs)?;
        let gamma = fit.slope;
        if j == degree + 1 || gamma < j as f64 - ORDER_WINDOW {
            return Ok(Extraction {
                orders: coefficients.len(),
                coefficients,
                remainder_exponent: Exponent::Finite(gamma),
                remainder_fit: Some(fit),
            });
        }
        let len = scale_len(&s.plus);
        if gamma > j as f64 + ORDER_WINDOW {
            coefficients.push(vec![Complex64::new(0.0, 0.0); len]);
            continue;
        }
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let xs: Vec<f64> = s.eps[..EXTRACTION_POINTS].iter().map(|e| e * e).collect();
        let ys: Vec<Vec<Complex64>> = (0..EXTRACTION_POINTS)
            .map(|i| {
                let inv = 1.0 / s.eps[i].powi(j as i32);
                let mut v: Vec<Complex64> = rp[i].iter().map(|z| z * (0.5 * inv)).collect();
                axpy(&mut v, 0.5 * inv * sign, &rm[i]);
                v
            })
            .collect();
        coefficients.push(extrapolate_to_zero(&xs, &ys));
    }
    unreachable!("loop returns at order degree + 1")
}

fn scale_len(v: &[Vec<Complex64>]) -> usize {
    v.first().map_or(0, |x| x.len())
}

fn sample(t: &dyn HolderTarget, eps: &[f64]) -> Result<Samples> {
    let mut plus = Vec::with_capacity(eps.len());
    let mut minus = Vec::with_capacity(eps.len());
    for &e in eps {
        plus.push(t.increment(e)?);
        minus.push(t.increment(-e)?);
    }
    Ok(Samples { eps: eps.to_vec(), plus, minus })
}

/// Pointwise Hölder probe of order `s` along one direction: extracts the
/// Peano coefficients `a_1 … a_⌊s⌋` from two-sided increments, fits the
/// decay of the remainder and checks the coefficients under halving the
/// smallest amplitude.
pub fn holder_probe(t: &dyn HolderTarget, s: f64, eps: &[f64]) -> Result<HolderFit> {
    if !(s.is_finite() && s > 0.0) {
        return Err(precondition(format!("Hölder order must be positive, got {s}")));
    }
    let mut eps: Vec<f64> = eps.to_vec();
    eps.sort_by(f64::total_cmp);
    eps.dedup();
    if eps.len() < 2 * EXTRACTION_POINTS || eps[0] <= 0.0 {
        return Err(precondition(format!(
            "need at least {} distinct positive amplitudes, got {}",
            2 * EXTRACTION_POINTS,
            eps.len()
        )));
    }
    let span = (eps[eps.len() - 1] / eps[0]).log10();
    if span < 1.5 {
        return Err(precondition(format!("amplitudes span {span:.2} decades; need 1.5 for a well-conditioned fit")));
    }
    let degree = s.floor() as usize;
    let samples = sample(t, &eps)?;
    let base = extract(t, &samples, degree)?;

    let mut finer = eps.clone();
    finer.insert(0, eps[0] / 2.0);
    let extra = sample(t, &finer[..1])?;
    let mut refined = Samples { eps: finer, plus: extra.plus, minus: extra.minus };
    refined.plus.extend(samples.plus.iter().cloned());
    refined.minus.extend(samples.minus.iter().cloned());
    let check = extract(t, &refined, degree)?;
    let stability = base
        .coefficients
        .iter()
        .zip(&check.coefficients)
        .map(|(a, b)| {
            let na = t.norm(a);
            let diff: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
            if na > 0.0 { t.norm(&diff) / na } else { t.norm(&diff) }
        })
        .fold(if base.orders == check.orders { 0.0 } else { f64::INFINITY }, f64::max);

    let verdict = match base.remainder_exponent {
        Exponent::Infinity => HolderVerdict::Membership,
        Exponent::Finite(g) if g >= s * (1.0 - VERDICT_SLACK) => HolderVerdict::Membership,
        Exponent::Finite(_) => HolderVerdict::Breakdown,
    };
    Ok(HolderFit {
        base: t.base_tag(),
        direction: t.direction_tag(),
        s,
        degree,
        coefficient_norms: base.coefficients.iter().map(|a| t.norm(a)).collect(),
        orders_extracted: base.orders,
        coefficients: base.coefficients,
        remainder_exponent: base.remainder_exponent,
        remainder_fit: base.remainder_fit,
        stability,
        stable: stability < STABILITY_LIMIT,
        verdict,
    })
}

/// Geometric amplitudes `ε_max · r^{-k}`, `k = 0..count`, in ascending order.
pub fn geometric_amplitudes(eps_max: f64, ratio: f64, count: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..count).map(|k| eps_max * ratio.powi(-(k as i32))).collect();
    v.reverse();
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Poly(Vec<f64>);

    impl HolderTarget for Poly {
        fn base_tag(&self) -> String {
            "0".into()
        }
        fn direction_tag(&self) -> String {
            "1".into()
        }
        fn increment(&self, eps: f64) -> Result<Vec<Complex64>> {
            let v = self.0.iter().enumerate().map(|(k, c)| c * eps.powi(k as i32 + 1)).sum();
            Ok(vec![Complex64::new(v, 0.0)])
        }
        fn norm(&self, v: &[Complex64]) -> f64 {
            v[0].norm()
        }
    }

    fn amps() -> Vec<f64> {
        geometric_amplitudes(0.1, 2f64.sqrt(), 12)
    }

    #[test]
    fn identity_is_exact() {
        let f = holder_probe(&Poly(vec![1.0]), 3.7, &amps()).unwrap();
        assert_eq!(f.remainder_exponent, Exponent::Infinity);
        assert_eq!(f.verdict, HolderVerdict::Membership);
        assert!((f.coefficient_norms[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn polynomial_of_degree_k() {
        let g = Poly(vec![1.0, -2.0, 0.5]);
        for s in [1.0, 2.0, 2.5, 3.0] {
            let f = holder_probe(&g, s, &amps()).unwrap();
            assert_eq!(f.verdict, HolderVerdict::Membership, "s = {s}");
            assert!(f.stable);
        }
        let f = holder_probe(&g, 3.0, &amps()).unwrap();
        assert_eq!(f.remainder_exponent, Exponent::Infinity);
        assert!((f.coefficient_norms[1] - 2.0).abs() < 1e-8);
    }

    #[test]
    fn scalar_model_breaks_at_one_plus_p() {
        for p in [1.5, 2.5, 3.0] {
            let m = ScalarModel { p };
            let f = holder_probe(&m, p + 1.5, &amps()).unwrap();
            let Exponent::Finite(g) = f.remainder_exponent else { panic!("finite remainder expected") };
            assert!((g - (1.0 + p)).abs() < 0.01 * (1.0 + p), "p = {p}: {g}");
            assert_eq!(f.verdict, HolderVerdict::Breakdown);
            let at = holder_probe(&m, p + 1.0, &amps()).unwrap();
            assert_eq!(at.verdict, HolderVerdict::Membership);
        }
    }

    #[test]
    fn even_power_is_polynomial() {
        let f = holder_probe(&ScalarModel { p: 2.0 }, 4.5, &amps()).unwrap();
        assert_eq!(f.remainder_exponent, Exponent::Infinity);
    }

    #[test]
    fn narrow_amplitude_range_is_rejected() {
        let eps = geometric_amplitudes(0.1, 1.1, 10);
        assert!(holder_probe(&ScalarModel { p: 3.0 }, 4.5, &eps).is_err());
    }
}
