//! Time meshes, composite quadrature and power-law tail extrapolation.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::fit::regress;

/// Nodes and composite Simpson weights on a time interval.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeMesh {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

fn even(n: usize) -> usize {
    let n = n.max(2);
    n + n % 2
}

fn simpson_unit(intervals: usize) -> Vec<f64> {
    let mut w = vec![0.0; intervals + 1];
    for (i, wi) in w.iter_mut().enumerate() {
        *wi = if i == 0 || i == intervals {
            1.0 / 3.0
        } else if i % 2 == 1 {
            4.0 / 3.0
        } else {
            2.0 / 3.0
        };
    }
    w
}

impl TimeMesh {
    /// Composite Simpson on `[t0, t1]` with an even number of intervals.
    pub fn uniform(t0: f64, t1: f64, intervals: usize) -> Result<Self> {
        if !(t0.is_finite() && t1.is_finite() && t1 > t0) {
            return Err(invalid(format!("bad interval [{t0}, {t1}]")));
        }
        let m = even(intervals);
        let h = (t1 - t0) / m as f64;
        let nodes = (0..=m).map(|i| if i == m { t1 } else { t0 + i as f64 * h }).collect();
        let weights = simpson_unit(m).into_iter().map(|w| w * h).collect();
        Ok(Self { nodes, weights })
    }

    /// Simpson in `log t` on `[t0, t1]`, `t0 > 0`, with about
    /// `per_decade` intervals per decade.
    pub fn log_uniform(t0: f64, t1: f64, per_decade: usize) -> Result<Self> {
        if !(t0 > 0.0 && t1.is_finite() && t1 > t0) {
            return Err(invalid(format!("log mesh needs 0 < t0 < t1, got [{t0}, {t1}]")));
        }
        let decades = (t1 / t0).log10();
        let m = even((decades * per_decade.max(1) as f64).ceil() as usize);
        let du = (t1 / t0).ln() / m as f64;
        let nodes: Vec<f64> =
            (0..=m).map(|i| if i == m { t1 } else { t0 * (i as f64 * du).exp() }).collect();
        let weights = simpson_unit(m).into_iter().zip(&nodes).map(|(w, t)| w * du * t).collect();
        Ok(Self { nodes, weights })
    }

    /// Uniform Simpson on `[t0, split]` followed by log-uniform Simpson on
    /// `[split, horizon]`; the shared node carries both weights. With
    /// `split <= t0` the mesh is log-uniform throughout.
    pub fn graded(
        t0: f64,
        split: f64,
        horizon: f64,
        uniform_intervals: usize,
        per_decade: usize,
    ) -> Result<Self> {
        if split <= t0 {
            return TimeMesh::log_uniform(t0, horizon, per_decade);
        }
        let head = TimeMesh::uniform(t0, split.min(horizon), uniform_intervals)?;
        if horizon <= split {
            return Ok(head);
        }
        let tail = TimeMesh::log_uniform(split, horizon, per_decade)?;
        let mut nodes = head.nodes;
        let mut weights = head.weights;
        *weights.last_mut().expect("nonempty") += tail.weights[0];
        nodes.extend_from_slice(&tail.nodes[1..]);
        weights.extend_from_slice(&tail.weights[1..]);
        Ok(Self { nodes, weights })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn start(&self) -> f64 {
        self.nodes[0]
    }

    pub fn end(&self) -> f64 {
        *self.nodes.last().expect("nonempty")
    }

    pub fn integrate(&self, values: &[f64]) -> f64 {
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }

    /// Half-widths `(t_{i+1} - t_i)/2` of the trapezoid rule, one per interval.
    pub fn trapezoid_half_widths(&self) -> Vec<f64> {
        self.nodes.windows(2).map(|w| 0.5 * (w[1] - w[0])).collect()
    }

    /// Running trapezoid integral from the first node; starts at zero.
    pub fn cumulative_trapezoid(&self, values: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(values.len());
        let mut acc = 0.0;
        out.push(0.0);
        for (i, hw) in self.trapezoid_half_widths().iter().enumerate() {
            acc += hw * (values[i] + values[i + 1]);
            out.push(acc);
        }
        out
    }
}

/// Analytic tail `∫_T^∞ c t^{slope} dt` of a power law fitted to the last
/// decade of samples and anchored at the last sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    /// Fitted integrand slope; always below `-1`.
    pub slope: f64,
    /// `f(T) T / (-slope - 1)`.
    pub amount: f64,
    /// `T / (-slope - 1)`; multiplies any quantity anchored at `T`.
    pub factor: f64,
    pub samples: usize,
}

/// Fits the decay of a positive integrand on the last decade of nodes
/// (at least four nodes) and integrates the fit from the last node to ∞.
pub fn power_law_tail(nodes: &[f64], values: &[f64]) -> Result<TailEstimate> {
    let n = nodes.len();
    if n < 4 || values.len() != n {
        return Err(invalid("tail extrapolation needs at least four samples"));
    }
    let t_end = nodes[n - 1];
    let f_end = values[n - 1];
    if f_end == 0.0 && values.iter().all(|v| *v == 0.0) {
        return Ok(TailEstimate { slope: f64::NEG_INFINITY, amount: 0.0, factor: 0.0, samples: 0 });
    }
    let first = nodes.iter().position(|t| *t >= t_end / 10.0).unwrap_or(0).min(n - 4);
    let pairs: Vec<(f64, f64)> = nodes[first..]
        .iter()
        .zip(&values[first..])
        .map(|(t, v)| (*t, *v))
        .collect();
    if pairs.iter().any(|(t, v)| !(*t > 0.0 && *v > 0.0)) {
        return Err(invalid("tail extrapolation needs a positive integrand on positive times"));
    }
    let fit = regress(&pairs);
    if fit.slope >= -1.0 {
        return Err(Error::NonIntegrableTail { slope: fit.slope });
    }
    let factor = t_end / (-fit.slope - 1.0);
    Ok(TailEstimate { slope: fit.slope, amount: f_end * factor, factor, samples: pairs.len() })
}
