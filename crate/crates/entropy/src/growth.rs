//! Exponential growth rates of finite sequences, base 2.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EntropyError {
    #[error("empty fit window")]
    EmptyWindow,
    #[error("k values must be strictly increasing")]
    NotIncreasing,
    #[error("negative value {0} at k = {1}")]
    Negative(f64, usize),
    #[error("window {0}..={1} outside the data")]
    WindowOutOfRange(usize, usize),
    #[error("no certified ε in the grid")]
    NoCertifiedEpsilon,
    #[error(transparent)]
    Barcode(#[from] floer_core::BarcodeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SeriesKind {
    Bars,
    Orbits,
    Length,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthSequence {
    pub kind: SeriesKind,
    pub values: Vec<(usize, f64)>,
}

impl GrowthSequence {
    pub fn new(kind: SeriesKind, values: Vec<(usize, f64)>) -> Result<Self, EntropyError> {
        if values.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(EntropyError::NotIncreasing);
        }
        if let Some(&(k, v)) = values.iter().find(|(_, v)| *v < 0.0 || v.is_nan()) {
            return Err(EntropyError::Negative(v, k));
        }
        Ok(Self { kind, values })
    }

    pub fn from_counts(kind: SeriesKind, counts: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, EntropyError> {
        Self::new(kind, counts.into_iter().map(|(k, c)| (k, c as f64)).collect())
    }
}

/// log⁺ in base 2, with log⁺ 0 = 0.
pub fn log_plus(v: f64) -> f64 {
    if v > 1.0 {
        v.log2()
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Window {
    /// Entries with k ≥ k_max/2 (and k ≥ 1).
    #[default]
    TrailingHalf,
    Range(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthFit {
    /// max over the window of log⁺(v_k)/k.
    pub max_rate: f64,
    /// Least-squares slope of log⁺(v_k) against k; `None` with fewer than two points.
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    /// Root-mean-square residual of the linear fit.
    pub residual: f64,
    pub window: (usize, usize),
}

impl GrowthFit {
    /// The slope when available, otherwise the max-over-window rate.
    pub fn rate(&self) -> f64 {
        self.slope.unwrap_or(self.max_rate)
    }
}

pub fn growth_exponent(s: &GrowthSequence, window: Window) -> Result<GrowthFit, EntropyError> {
    let kmax = s.values.last().map(|v| v.0).ok_or(EntropyError::EmptyWindow)?;
    let (lo, hi) = match window {
        Window::TrailingHalf => ((kmax / 2).max(1), kmax),
        Window::Range(a, b) => {
            if a > b || b > kmax {
                return Err(EntropyError::WindowOutOfRange(a, b));
            }
            (a.max(1), b)
        }
    };
    let pts: Vec<(f64, f64)> =
        s.values.iter().filter(|(k, _)| *k >= lo && *k <= hi).map(|&(k, v)| (k as f64, log_plus(v))).collect();
    if pts.is_empty() {
        return Err(EntropyError::EmptyWindow);
    }
    let max_rate = pts.iter().map(|(k, l)| l / k).fold(f64::NEG_INFINITY, f64::max);
    let n = pts.len() as f64;
    let (slope, intercept, residual) = if pts.len() >= 2 {
        let mk = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let ml = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|(k, l)| (k - mk) * (l - ml)).sum();
        let sxx: f64 = pts.iter().map(|(k, _)| (k - mk) * (k - mk)).sum();
        let b = sxy / sxx;
        let a = ml - b * mk;
        let r = (pts.iter().map(|(k, l)| (l - a - b * k).powi(2)).sum::<f64>() / n).sqrt();
        (Some(b), Some(a), r)
    } else {
        (None, None, 0.0)
    };
    Ok(GrowthFit { max_rate, slope, intercept, residual, window: (lo, hi) })
}
