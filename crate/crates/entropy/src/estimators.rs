//! Barcode, orbit and volume entropy estimates and the comparisons between them.

use floer_core::barcode::barcode;
use floer_core::rational::{snap_default, to_f64};
use floer_core::{Barcode, FloerPackage, Q};
use floer_dynamics::curves::CurveGrowth;
use floer_dynamics::orbits::OrbitTable;
use rayon::prelude::*;
use serde::Serialize;

use crate::growth::{growth_exponent, EntropyError, GrowthFit, GrowthSequence, SeriesKind, Window};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpsilonRow {
    #[serde(serialize_with = "crate::report::ser_q")]
    pub eps: Q,
    pub counts: Vec<(usize, usize)>,
    pub fit: GrowthFit,
    /// Largest fitted rate over this ε and all larger ones.
    pub envelope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BarcodeEntropy {
    /// Rows in decreasing ε.
    pub rows: Vec<EpsilonRow>,
    /// Grid points at or below the certification floor.
    #[serde(serialize_with = "crate::report::ser_q_vec")]
    pub excluded: Vec<Q>,
    /// ĥ: the envelope at the smallest certified ε.
    pub value: f64,
    /// β_max per k.
    #[serde(serialize_with = "crate::report::ser_kq_vec")]
    pub boundary_depth: Vec<(usize, Q)>,
}

impl BarcodeEntropy {
    /// ĥ_ε for each grid point, decreasing ε.
    pub fn h_eps(&self) -> Vec<(Q, f64)> {
        self.rows.iter().map(|r| (r.eps, r.envelope)).collect()
    }
}

/// Barcodes of per-k packages, computed in parallel and returned in k order.
pub fn barcodes(packages: &[(usize, FloerPackage)]) -> Result<Vec<(usize, Barcode)>, EntropyError> {
    packages
        .par_iter()
        .map(|(k, p)| barcode(p).map(|b| (*k, b)).map_err(EntropyError::from))
        .collect()
}

/// ĥ_ε over an ε grid; ε at or below `floor` is not certified and is excluded.
pub fn barcode_entropy_from_barcodes(
    bars: &[(usize, Barcode)],
    eps_grid: &[Q],
    floor: &Q,
    window: Window,
) -> Result<BarcodeEntropy, EntropyError> {
    let mut grid: Vec<Q> = eps_grid.to_vec();
    grid.sort_by(|a, b| b.cmp(a));
    grid.dedup();
    let (certified, excluded): (Vec<Q>, Vec<Q>) = grid.into_iter().partition(|e| e > floor);
    if certified.is_empty() {
        return Err(EntropyError::NoCertifiedEpsilon);
    }
    let mut rows = Vec::new();
    let mut envelope = f64::NEG_INFINITY;
    for eps in certified {
        let counts: Vec<(usize, usize)> = bars.iter().map(|(k, b)| (*k, b.b_eps(&eps))).collect();
        let fit = growth_exponent(&GrowthSequence::from_counts(SeriesKind::Bars, counts.clone())?, window)?;
        envelope = envelope.max(fit.rate());
        rows.push(EpsilonRow { eps, counts, fit, envelope });
    }
    let value = rows.last().map(|r| r.envelope).unwrap_or(0.0);
    let boundary_depth = bars.iter().map(|(k, b)| (*k, b.boundary_depth())).collect();
    Ok(BarcodeEntropy { rows, excluded, value, boundary_depth })
}

pub fn barcode_entropy(
    packages: &[(usize, FloerPackage)],
    eps_grid: &[Q],
    floor: &Q,
    window: Window,
) -> Result<BarcodeEntropy, EntropyError> {
    barcode_entropy_from_barcodes(&barcodes(packages)?, eps_grid, floor, window)
}

/// Growth of p(k), or of the hyperbolic points only.
pub fn orbit_entropy(tables: &[OrbitTable], hyperbolic_only: bool, window: Window) -> Result<GrowthFit, EntropyError> {
    let counts = tables.iter().map(|t| (t.period, if hyperbolic_only { t.hyperbolic_point_count() } else { t.point_count() }));
    growth_exponent(&GrowthSequence::from_counts(SeriesKind::Orbits, counts)?, window)
}

/// Growth of the iterated curve lengths (k ≥ 1).
pub fn volume_entropy(g: &CurveGrowth, window: Window) -> Result<GrowthFit, EntropyError> {
    let values = g.lengths.iter().filter(|(k, _, _)| *k >= 1).map(|(k, l, _)| (*k, *l)).collect();
    growth_exponent(&GrowthSequence::new(SeriesKind::Length, values)?, window)
}

/// Decreasing ε grid, logarithmic from `top` to `bottom`, snapped to the exact grid.
pub fn log_eps_grid(top: f64, bottom: f64, n: usize) -> Vec<Q> {
    assert!(top > 0.0 && bottom > 0.0 && top >= bottom && n >= 1);
    let mut g: Vec<Q> = (0..n)
        .map(|i| {
            let t = if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
            snap_default(top * (bottom / top).powf(t))
        })
        .collect();
    g.dedup();
    g
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tolerance {
    pub relative: f64,
    pub absolute: f64,
    /// Slack allowed on each inequality.
    pub inequality: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { relative: 0.15, absolute: 0.05, inequality: 0.05 }
    }
}

impl Tolerance {
    pub fn exact() -> Self {
        Self { relative: 0.0, absolute: 0.0, inequality: 0.0 }
    }

    pub fn equal(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= (self.relative * b.abs()).max(self.absolute)
    }

    pub fn at_most(&self, a: f64, b: f64) -> bool {
        a <= b + self.inequality
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", content = "detail", rename_all = "lowercase")]
pub enum Verdict {
    Pass(String),
    Fail(String),
    Inconclusive(String),
}

impl Verdict {
    pub fn passed(&self) -> bool {
        matches!(self, Verdict::Pass(_))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct TheoremInputs {
    pub barcode: Option<f64>,
    pub volume: Option<f64>,
    /// Orbit-growth proxy for the topological entropy.
    pub orbit: Option<f64>,
    /// Rate of a hyperbolic invariant set.
    pub hyperbolic: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdicts {
    /// ĥ ≤ topological entropy proxy.
    pub upper: Verdict,
    /// ĥ ≥ hyperbolic-set rate.
    pub lower: Verdict,
    /// ĥ = topological entropy proxy.
    pub equality: Verdict,
    /// ĥ ≤ volume growth ≤ topological entropy proxy.
    pub chain: Verdict,
    pub tolerance: Tolerance,
}

impl Verdicts {
    pub fn all(&self) -> [(&'static str, &Verdict); 4] {
        [("upper", &self.upper), ("lower", &self.lower), ("equality", &self.equality), ("chain", &self.chain)]
    }
}

fn ineq(name: &str, a: Option<f64>, an: &str, b: Option<f64>, bn: &str, tol: &Tolerance) -> Verdict {
    match (a, b) {
        (Some(a), Some(b)) if tol.at_most(a, b) => Verdict::Pass(format!("{an} = {a:.4} <= {bn} = {b:.4} + {}", tol.inequality)),
        (Some(a), Some(b)) => Verdict::Fail(format!("{an} = {a:.4} > {bn} = {b:.4} + {}", tol.inequality)),
        _ => Verdict::Inconclusive(format!("{name}: missing {}", if a.is_none() { an } else { bn })),
    }
}

pub fn compare_theorems(inputs: &TheoremInputs, tol: &Tolerance) -> Verdicts {
    let top = inputs.orbit.or(inputs.volume);
    let upper = ineq("upper", inputs.barcode, "barcode", top, "top", tol);
    let lower = ineq("lower", inputs.hyperbolic, "hyperbolic", inputs.barcode, "barcode", tol);
    let equality = match (inputs.barcode, top) {
        (Some(a), Some(b)) if tol.equal(a, b) => Verdict::Pass(format!("|{a:.4} - {b:.4}| within tolerance")),
        (Some(a), Some(b)) => Verdict::Fail(format!("|{a:.4} - {b:.4}| outside tolerance")),
        _ => Verdict::Inconclusive("equality: need barcode and top estimates".into()),
    };
    let chain = match (inputs.barcode, inputs.volume, inputs.orbit) {
        (Some(h), Some(v), Some(o)) => {
            let first = tol.at_most(h, v);
            let second = tol.at_most(v, o);
            let msg = format!("barcode {h:.4}, volume {v:.4}, orbit {o:.4}, slack {}", tol.inequality);
            if first && second {
                Verdict::Pass(msg)
            } else {
                Verdict::Fail(msg)
            }
        }
        (Some(h), Some(v), None) => ineq("chain", Some(h), "barcode", Some(v), "volume", tol),
        _ => Verdict::Inconclusive("chain: need barcode and volume estimates".into()),
    };
    Verdicts { upper, lower, equality, chain, tolerance: tol.clone() }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaBound {
    #[serde(serialize_with = "crate::report::ser_kq_vec")]
    pub per_k: Vec<(usize, Q)>,
    #[serde(serialize_with = "crate::report::ser_q")]
    pub floor: Q,
    pub bounded_away: bool,
}

/// β_max per k as a lower bound for the spectral norm; flagged when the minimum exceeds `threshold`.
pub fn gamma_lower_bound(bars: &[(usize, Barcode)], threshold: &Q) -> GammaBound {
    let per_k: Vec<(usize, Q)> = bars.iter().map(|(k, b)| (*k, b.boundary_depth())).collect();
    let floor = per_k.iter().map(|p| p.1).min().unwrap_or_else(|| Q::from_integer(0));
    GammaBound { bounded_away: !per_k.is_empty() && floor > *threshold, per_k, floor }
}

/// Ratios rate(v_{mk}) / (m · rate(v_k)) for subsampling factors m; logged without a verdict.
pub fn subsampling_ratios(s: &GrowthSequence, factors: &[usize]) -> Vec<(usize, Option<f64>)> {
    let base = growth_exponent(s, Window::TrailingHalf).map(|f| f.rate()).ok();
    factors
        .iter()
        .map(|&m| {
            let sub: Vec<(usize, f64)> = s.values.iter().filter(|(k, _)| *k > 0 && k % m == 0).map(|(k, v)| (k / m, *v)).collect();
            let r = GrowthSequence::new(s.kind, sub)
                .ok()
                .and_then(|g| growth_exponent(&g, Window::TrailingHalf).ok())
                .map(|f| f.rate());
            let ratio = match (r, base) {
                (Some(r), Some(b)) if b > 0.0 => Some(r / (m as f64 * b)),
                _ => None,
            };
            (m, ratio)
        })
        .collect()
}

pub fn q_value(q: &Q) -> f64 {
    to_f64(q)
}
