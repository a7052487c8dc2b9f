//! Closed-form exponents, thresholds and admissibility conditions.
//!
//! Everything here is a pure function of `(d, p)` and a few auxiliary
//! exponents, evaluated in double precision with a fixed tolerance of
//! [`TOL`].

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Tolerance used for every exact-arithmetic comparison in this module.
pub const TOL: f64 = 1e-12;

/// A Lebesgue exponent in `[1, ∞]`. Infinity is a distinguished value,
/// serialized as the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Serialize for Exponent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(v) => s.serialize_f64(*v),
            Exponent::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(Exponent::Finite(v)),
            Repr::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

impl Exponent {
    /// `1/r`, with `1/∞ = 0`.
    pub fn reciprocal(self) -> f64 {
        match self {
            Exponent::Finite(r) => 1.0 / r,
            Exponent::Infinity => 0.0,
        }
    }

    /// Hölder conjugate `r'` with `1/r + 1/r' = 1`.
    pub fn conjugate(self) -> Exponent {
        match self {
            Exponent::Infinity => Exponent::Finite(1.0),
            Exponent::Finite(r) if (r - 1.0).abs() <= TOL => Exponent::Infinity,
            Exponent::Finite(r) => Exponent::Finite(r / (r - 1.0)),
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Exponent::Infinity)
    }

    /// Finite value, or `f64::INFINITY`.
    pub fn value(self) -> f64 {
        match self {
            Exponent::Finite(r) => r,
            Exponent::Infinity => f64::INFINITY,
        }
    }
}

impl std::str::FromStr for Exponent {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(Exponent::Infinity),
            t => t
                .parse::<f64>()
                .map_err(|e| format!("bad exponent {t:?}: {e}"))
                .and_then(|v| {
                    if v.is_infinite() && v > 0.0 {
                        Ok(Exponent::Infinity)
                    } else if v.is_finite() {
                        Ok(Exponent::Finite(v))
                    } else {
                        Err(format!("bad exponent {t:?}"))
                    }
                }),
        }
    }
}

impl std::fmt::Display for Exponent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Exponent::Finite(r) => write!(f, "{r}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

/// Dimension and nonlinearity power of `i u_t + Δu = |u|^p u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysParams {
    pub d: u32,
    pub p: f64,
}

impl PhysParams {
    pub fn new(d: u32, p: f64) -> Result<Self> {
        if d < 1 {
            return Err(invalid(format!("dimension must be >= 1, got {d}")));
        }
        if !(p.is_finite() && p > 0.0) {
            return Err(invalid(format!("nonlinearity power must be > 0, got {p}")));
        }
        Ok(Self { d, p })
    }

    pub fn dim(&self) -> f64 {
        self.d as f64
    }

    /// `0 < p < 4/d`.
    pub fn is_mass_subcritical(&self) -> bool {
        self.p > 0.0 && self.p < 4.0 / self.dim()
    }

    /// `α(d) < p < 4/d`.
    pub fn in_scattering_regime(&self) -> bool {
        let alpha = strauss_exponent(self.d).expect("d >= 1 by construction");
        self.p > alpha && self.is_mass_subcritical()
    }

    /// `dp/2`, the decay rate of `‖u(t)‖_{p+2}^{p+2}`.
    pub fn decay_rate(&self) -> f64 {
        self.dim() * self.p / 2.0
    }

    /// `2 - dp/2`, the parabolic scaling exponent of `‖e^{itΔ}φ‖_{p+2,p+2}^{p+2}`.
    pub fn scaling_exponent(&self) -> f64 {
        2.0 - self.decay_rate()
    }

    fn require_subcritical(&self) -> Result<()> {
        if self.is_mass_subcritical() {
            Ok(())
        } else {
            Err(invalid(format!(
                "p = {} lies outside the mass-subcritical range (0, 4/d) = (0, {})",
                self.p,
                4.0 / self.dim()
            )))
        }
    }
}

/// Strauss exponent `α(d) = (2 - d + √((d-2)² + 16d)) / (2d)`.
pub fn strauss_exponent(d: u32) -> Result<f64> {
    if d < 1 {
        return Err(invalid(format!("dimension must be >= 1, got {d}")));
    }
    let d = d as f64;
    Ok((2.0 - d + ((d - 2.0).powi(2) + 16.0 * d).sqrt()) / (2.0 * d))
}

/// `q = 4(p+2)/(dp)`, making `(q, p+2)` admissible.
pub fn canonical_q(params: PhysParams) -> Result<f64> {
    params.require_subcritical()?;
    Ok(4.0 * (params.p + 2.0) / (params.dim() * params.p))
}

/// Interpolation weight `θ = 1 - dp/(2(p+2))`.
pub fn theta(params: PhysParams) -> Result<f64> {
    params.require_subcritical()?;
    Ok(1.0 - params.dim() * params.p / (2.0 * (params.p + 2.0)))
}

/// `2/q + d/r = d/2` with `q, r ∈ [2, ∞]`, excluding `(d, q, r) = (2, 2, ∞)`.
/// Exponents outside `[2, ∞]` are never admissible.
pub fn is_admissible_pair(d: u32, q: Exponent, r: Exponent) -> bool {
    let in_range = |e: Exponent| match e {
        Exponent::Infinity => true,
        Exponent::Finite(v) => v.is_finite() && v >= 2.0 - TOL,
    };
    if d < 1 || !in_range(q) || !in_range(r) {
        return false;
    }
    if d == 2 && matches!(q, Exponent::Finite(v) if (v - 2.0).abs() <= TOL) && r.is_infinite() {
        return false;
    }
    let d = d as f64;
    (2.0 * q.reciprocal() + d * r.reciprocal() - d / 2.0).abs() <= TOL
}

/// `(a, b)` is dual admissible when `(a', b')` is admissible.
pub fn is_dual_admissible_pair(d: u32, a: Exponent, b: Exponent) -> bool {
    is_admissible_pair(d, a.conjugate(), b.conjugate())
}

/// Unsharpened error exponent `2(2p+1)/(p+2)`.
pub fn unsharpened_q(params: PhysParams) -> f64 {
    2.0 * (2.0 * params.p + 1.0) / (params.p + 2.0)
}

/// Raw evaluation of `Q(d,p,η,ν) = 2p(1-η) + (1-ν) + 2(2ηp + ν)/(p+2)`
/// without any domain check. Use [`sharpened_q`] for the checked version.
pub fn sharpened_q_formula(params: PhysParams, eta: f64, nu: f64) -> f64 {
    let p = params.p;
    2.0 * p * (1.0 - eta) + (1.0 - nu) + 2.0 / (p + 2.0) * (2.0 * eta * p + nu)
}

/// Lower end `(q-2)/(2p)` of the admissible η interval.
pub fn eta_floor(params: PhysParams) -> Result<f64> {
    Ok((canonical_q(params)? - 2.0) / (2.0 * params.p))
}

/// Sharpened error exponent on its admissible rectangle
/// `(q-2)/(2p) < η ≤ 1`, `1/2 < ν ≤ 1`.
pub fn sharpened_q(params: PhysParams, eta: f64, nu: f64) -> Result<f64> {
    let floor = eta_floor(params)?;
    if floor >= 1.0 {
        return Err(invalid(format!(
            "empty η range: (q-2)/(2p) = {floor} >= 1 (p is at or below the Strauss exponent)"
        )));
    }
    if !(eta > floor && eta <= 1.0) {
        return Err(invalid(format!("η = {eta} outside ({floor}, 1]")));
    }
    if !(nu > 0.5 && nu <= 1.0) {
        return Err(invalid(format!("ν = {nu} outside (1/2, 1]")));
    }
    Ok(sharpened_q_formula(params, eta, nu))
}

/// Polynomial `2dp² + (11d-8)p + (8d-16)` together with its sign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowDimCondition {
    pub value: f64,
    pub positive: bool,
}

pub fn low_dim_condition(params: PhysParams) -> LowDimCondition {
    let (d, p) = (params.dim(), params.p);
    let value = 2.0 * d * p * p + (11.0 * d - 8.0) * p + (8.0 * d - 16.0);
    LowDimCondition { value, positive: value > 0.0 }
}

/// Polynomial obtained by expanding `Q(d,p,(q-2)/(2p),1/2) > 1+p` directly
/// from the Q formula: `2dp² + (7d-8)p - 16 > 0`.
pub fn corner_condition_polynomial(params: PhysParams) -> f64 {
    let (d, p) = (params.dim(), params.p);
    2.0 * d * p * p + (7.0 * d - 8.0) * p - 16.0
}

/// `j[s-(p+1)] + 2 - dp/2 - s`, the growth rate in σ of the Σ-quotient
/// along `ε = σ^{-j}`.
pub fn quotient_growth_exponent(params: PhysParams, s: f64, j: f64) -> Result<f64> {
    if !(j > 1.0) {
        return Err(invalid(format!("scaling link j must exceed 1, got {j}")));
    }
    Ok(j * (s - (params.p + 1.0)) + params.scaling_exponent() - s)
}

/// Growth rate of the L²-quotient `‖T(φ)-φ‖₂ / ‖φ‖₂^{1+β}`: `j(β-p) + 2 - dp/2`.
pub fn l2_quotient_growth_exponent(params: PhysParams, beta: f64, j: f64) -> Result<f64> {
    if !(j > 1.0) {
        return Err(invalid(format!("scaling link j must exceed 1, got {j}")));
    }
    Ok(j * (beta - params.p) + params.scaling_exponent())
}

/// Threshold `p - (2 - dp/2)/j` above which the L²-quotient blows up.
pub fn beta_threshold(params: PhysParams, j: f64) -> Result<f64> {
    if !(j > 1.0) {
        return Err(invalid(format!("scaling link j must exceed 1, got {j}")));
    }
    if params.dim() * params.p >= 4.0 {
        return Err(invalid(format!("requires dp < 4, got dp = {}", params.dim() * params.p)));
    }
    Ok(params.p - params.scaling_exponent() / j)
}

/// Smallest j for which the Σ-quotient at order `s` grows, i.e. the root of
/// [`quotient_growth_exponent`] in j. `None` when `s <= 1+p`.
pub fn j_min_for_order(params: PhysParams, s: f64) -> Option<f64> {
    let gap = s - (params.p + 1.0);
    if gap <= 0.0 {
        return None;
    }
    Some((s - params.scaling_exponent()) / gap)
}

/// Infimum of the links j for which the main term `σ^{-j(p+1)+2-dp/2}`
/// dominates an error bounded by `σ^{(1-j)Q}`. `None` unless `Q > 1+p`.
pub fn j_min_for_error_exponent(params: PhysParams, q_err: f64) -> Option<f64> {
    let gap = q_err - (params.p + 1.0);
    if gap <= TOL {
        return None;
    }
    Some(((q_err - 2.0 + params.decay_rate()) / gap).max(1.0))
}

/// Result of comparing the Q-formula route with the printed polynomial.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AppendixConsistency {
    pub eta_floor: f64,
    pub nu_floor: f64,
    /// Supremum of Q over the admissible rectangle, attained at its infimum corner.
    pub sup_q: f64,
    pub one_plus_p: f64,
    pub sup_q_exceeds: bool,
    pub polynomial: LowDimCondition,
    /// The condition as it follows algebraically from the Q formula.
    pub derived_polynomial: f64,
    pub routes_agree: bool,
}

/// Evaluates the sufficiency condition `1+p < sup Q` both through the Q
/// formula and through the printed polynomial, and flags disagreement.
pub fn consistency_check(params: PhysParams) -> Result<AppendixConsistency> {
    let eta0 = eta_floor(params)?;
    let sup_q = sharpened_q_formula(params, eta0, 0.5);
    let one_plus_p = 1.0 + params.p;
    let sup_q_exceeds = sup_q > one_plus_p;
    let polynomial = low_dim_condition(params);
    Ok(AppendixConsistency {
        eta_floor: eta0,
        nu_floor: 0.5,
        sup_q,
        one_plus_p,
        sup_q_exceeds,
        polynomial,
        derived_polynomial: corner_condition_polynomial(params),
        routes_agree: sup_q_exceeds == polynomial.positive,
    })
}

/// Evaluated sharpened exponent for a particular (η, ν).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SharpenedEval {
    pub eta: f64,
    pub nu: f64,
    pub value: f64,
}

/// Everything the `exponents` subcommand reports.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExponentReport {
    pub d: u32,
    pub p: f64,
    pub alpha_d: f64,
    pub mass_subcritical: bool,
    pub scattering_regime: bool,
    pub q: Option<f64>,
    pub theta: Option<f64>,
    pub q_unsharp: f64,
    pub sharpened: Option<SharpenedEval>,
    pub consistency: Option<AppendixConsistency>,
    /// Minimal link j from the error exponent that the Q formula supports:
    /// `sup Q` when `p < 1` is not enough, otherwise the unsharpened exponent.
    pub j_min: Option<f64>,
    /// `beta_threshold` at `j_min`.
    pub beta_min: Option<f64>,
    /// Range of β thresholds admissible when the printed polynomial is taken
    /// at face value (some unspecified `Q > 1+p`): `(p - (2 - dp/2), p)`.
    pub beta_range_polynomial_reading: Option<(f64, f64)>,
}

/// Builds the full report. `sharpened` optionally evaluates Q at `(η, ν)`.
pub fn report(params: PhysParams, sharpened: Option<(f64, f64)>) -> Result<ExponentReport> {
    let alpha_d = strauss_exponent(params.d)?;
    let subcritical = params.is_mass_subcritical();
    let q = canonical_q(params).ok();
    let theta_v = theta(params).ok();
    let sharpened = match sharpened {
        Some((eta, nu)) => Some(SharpenedEval { eta, nu, value: sharpened_q(params, eta, nu)? }),
        None => None,
    };
    let consistency = if subcritical { consistency_check(params).ok() } else { None };

    let q_best = match &consistency {
        Some(c) if c.eta_floor < 1.0 => c.sup_q.max(unsharpened_q(params)),
        _ => unsharpened_q(params),
    };
    let j_min = if subcritical { j_min_for_error_exponent(params, q_best) } else { None };
    let dp_ok = params.dim() * params.p < 4.0;
    let beta_min = match j_min {
        Some(j) if dp_ok && j > 1.0 => beta_threshold(params, j).ok(),
        _ => None,
    };
    let beta_range_polynomial_reading = match &consistency {
        Some(c) if c.polynomial.positive && dp_ok => {
            Some((params.p - params.scaling_exponent(), params.p))
        }
        _ => None,
    };
    Ok(ExponentReport {
        d: params.d,
        p: params.p,
        alpha_d,
        mass_subcritical: subcritical,
        scattering_regime: params.in_scattering_regime(),
        q,
        theta: theta_v,
        q_unsharp: unsharpened_q(params),
        sharpened,
        consistency,
        j_min,
        beta_min,
        beta_range_polynomial_reading,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pp(d: u32, p: f64) -> PhysParams {
        PhysParams::new(d, p).unwrap()
    }

    #[test]
    fn strauss_values() {
        assert_eq!(strauss_exponent(3).unwrap(), 1.0);
        assert!((strauss_exponent(2).unwrap() - 2f64.sqrt()).abs() < TOL);
        assert!((strauss_exponent(1).unwrap() - (1.0 + 17f64.sqrt()) / 2.0).abs() < TOL);
        assert!(strauss_exponent(0).is_err());
    }

    #[test]
    fn strauss_is_root_of_quadratic() {
        for d in 1..=8u32 {
            let a = strauss_exponent(d).unwrap();
            let df = d as f64;
            assert!(a > 0.0 && a < 4.0 / df);
            assert!((df * a * a + (df - 2.0) * a - 4.0).abs() < TOL);
        }
    }

    #[test]
    fn canonical_q_values() {
        assert!((canonical_q(pp(1, 3.0)).unwrap() - 20.0 / 3.0).abs() < TOL);
        assert!((canonical_q(pp(2, 1.0)).unwrap() - 6.0).abs() < TOL);
        let q = canonical_q(pp(1, 3.0)).unwrap();
        assert!((2.0 / q + 1.0 / 5.0 - 0.5).abs() < TOL);
        assert!(canonical_q(pp(1, 4.0)).is_err());
        assert!(canonical_q(pp(2, 2.5)).is_err());
    }

    #[test]
    fn admissible_pairs() {
        use Exponent::*;
        assert!(is_admissible_pair(1, Infinity, Finite(2.0)));
        assert!(!is_admissible_pair(2, Finite(2.0), Infinity));
        assert!(is_admissible_pair(3, Finite(2.0), Finite(6.0)));
        assert!(is_admissible_pair(1, Finite(4.0), Infinity));
        assert!(!is_admissible_pair(1, Finite(3.0), Finite(2.0)));
        assert!(!is_admissible_pair(3, Finite(1.5), Finite(18.0)));
        assert!(is_dual_admissible_pair(3, Finite(2.0), Finite(6.0 / 5.0)));
    }

    #[test]
    fn conjugates() {
        assert_eq!(Exponent::Finite(2.0).conjugate(), Exponent::Finite(2.0));
        assert_eq!(Exponent::Infinity.conjugate(), Exponent::Finite(1.0));
        assert_eq!(Exponent::Finite(1.0).conjugate(), Exponent::Infinity);
        assert_eq!("inf".parse::<Exponent>().unwrap(), Exponent::Infinity);
    }

    #[test]
    fn sharpened_q_reductions() {
        let p = pp(1, 3.0);
        assert!((sharpened_q(p, 1.0, 1.0).unwrap() - 2.8).abs() < TOL);
        assert!((sharpened_q_formula(p, 7.0 / 9.0, 0.5) - 3.9).abs() < TOL);
        assert!((eta_floor(p).unwrap() - 7.0 / 9.0).abs() < TOL);
        // the corner itself is excluded from the checked domain
        assert!(sharpened_q(p, 7.0 / 9.0, 0.75).is_err());
        assert!(sharpened_q(p, 0.9, 0.5).is_err());
        assert!(sharpened_q(p, 1.1, 0.75).is_err());
    }

    #[test]
    fn sharpened_q_monotone_by_finite_differences() {
        let p = pp(1, 3.0);
        let h = 1e-6;
        for &(eta, nu) in &[(0.8, 0.6), (0.9, 0.9), (0.95, 0.7)] {
            let q0 = sharpened_q(p, eta, nu).unwrap();
            let de = (sharpened_q(p, eta + h, nu).unwrap() - q0) / h;
            let dn = (sharpened_q(p, eta, nu + h).unwrap() - q0) / h;
            assert!((de + 2.0 * 3.0 * 3.0 / 5.0).abs() < 1e-6, "{de}");
            assert!((dn + 3.0 / 5.0).abs() < 1e-6, "{dn}");
            assert!(sharpened_q(p, eta + 0.01, nu).unwrap() < q0);
        }
    }

    #[test]
    fn low_dim_polynomial() {
        assert!((low_dim_condition(pp(2, 1.0)).value - 18.0).abs() < TOL);
        assert!((low_dim_condition(pp(1, 3.0)).value - 19.0).abs() < TOL);
        let root = (-3.0 + 73f64.sqrt()) / 4.0;
        assert!(root < 1.5);
        assert!(low_dim_condition(pp(1, root)).value.abs() < 1e-12);
    }

    #[test]
    fn quotient_exponent_values() {
        let p = pp(1, 3.0);
        assert!((quotient_growth_exponent(p, 4.5, 10.0).unwrap() - 1.0).abs() < TOL);
        assert!((quotient_growth_exponent(p, 4.0, 7.0).unwrap() - (2.0 - 1.5 - 4.0)).abs() < TOL);
        let first = (2..20).find(|&j| quotient_growth_exponent(p, 4.5, j as f64).unwrap() > 0.0);
        assert_eq!(first, Some(9));
        assert!(quotient_growth_exponent(p, 4.5, 1.0).is_err());
        assert!((j_min_for_order(p, 4.5).unwrap() - 8.0).abs() < TOL);
        assert!(j_min_for_order(p, 4.0).is_none());
    }

    #[test]
    fn quotient_exponent_is_affine() {
        let p = pp(1, 3.0);
        let f = |s: f64, j: f64| quotient_growth_exponent(p, s, j).unwrap();
        let (a, b, c) = (f(4.0, 3.0), f(4.5, 3.0), f(5.0, 3.0));
        assert!((b - (a + c) / 2.0).abs() < TOL);
        let (a, b, c) = (f(4.5, 2.0), f(4.5, 5.0), f(4.5, 8.0));
        assert!((b - (a + c) / 2.0).abs() < TOL);
    }

    #[test]
    fn beta_threshold_values() {
        assert!((beta_threshold(pp(4, 0.5), 10.0).unwrap() - 0.4).abs() < TOL);
        let b = beta_threshold(pp(1, 3.0), 9.0).unwrap();
        assert!((b - (3.0 - 0.5 / 9.0)).abs() < TOL);
        assert!((beta_threshold(pp(1, 3.0), 1e12).unwrap() - 3.0).abs() < 1e-11);
        assert!(beta_threshold(pp(1, 4.0), 9.0).is_err());
        let mut prev = f64::NEG_INFINITY;
        for j in [1.5, 2.0, 4.0, 16.0, 256.0] {
            let b = beta_threshold(pp(1, 3.0), j).unwrap();
            assert!(b < 3.0 && b > prev);
            prev = b;
        }
    }

    #[test]
    fn consistency_flags_d1_disagreement() {
        let c = consistency_check(pp(1, 3.0)).unwrap();
        assert!((c.sup_q - 3.9).abs() < TOL);
        assert_eq!(c.one_plus_p, 4.0);
        assert!(!c.sup_q_exceeds);
        assert!(c.polynomial.positive);
        assert!(!c.routes_agree);
        assert!((c.derived_polynomial + 1.0).abs() < TOL);
    }

    #[test]
    fn unsharpened_dominance_high_dim() {
        let q = unsharpened_q(pp(4, 0.9));
        assert!((q - 2.0 * 2.8 / 2.9).abs() < TOL);
        assert!(q > 1.9);
        assert!((unsharpened_q(pp(4, 1.0)) - 2.0).abs() < TOL);
    }

    #[test]
    fn report_fields() {
        let r = report(pp(3, 1.5), None).unwrap();
        assert_eq!(r.alpha_d, 1.0);
        assert!(!r.scattering_regime);
        assert!(report(pp(3, 1.2), None).unwrap().scattering_regime);
        let r = report(pp(4, 0.9), Some((1.0, 1.0))).unwrap();
        assert!(r.j_min.is_some());
        assert!(r.beta_min.unwrap() < 0.9);
        let r = report(pp(1, 3.0), None).unwrap();
        assert!(r.j_min.is_none());
        let (lo, hi) = r.beta_range_polynomial_reading.unwrap();
        assert!((lo - 2.5).abs() < TOL && (hi - 3.0).abs() < TOL);
    }
}
