//! Length growth of iterated curves and graph volume of iterates.

use rayon::prelude::*;

use crate::twist::{Tangent, TwistMapModel};

/// Closed or open polyline in the lifted plane, parametrized uniformly by s ∈ [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    pub points: Vec<(f64, f64)>,
}

impl Polyline {
    pub fn new(points: Vec<(f64, f64)>) -> Self {
        assert!(points.len() >= 2, "a polyline needs two points");
        Self { points }
    }

    /// The loop y = 0 lifted to the segment (0,0)-(1,0).
    pub fn zero_section() -> Self {
        Self::new(vec![(0.0, 0.0), (1.0, 0.0)])
    }

    pub fn horizontal(y: f64) -> Self {
        Self::new(vec![(0.0, y), (1.0, y)])
    }

    pub fn vertical(x: f64, y0: f64, y1: f64) -> Self {
        Self::new(vec![(x, y0), (x, y1)])
    }

    pub fn eval(&self, s: f64) -> (f64, f64) {
        let n = self.points.len() - 1;
        let t = (s.clamp(0.0, 1.0) * n as f64).min(n as f64);
        let i = (t.floor() as usize).min(n - 1);
        let f = t - i as f64;
        let (a, b) = (self.points[i], self.points[i + 1]);
        (a.0 + f * (b.0 - a.0), a.1 + f * (b.1 - a.1))
    }

    pub fn length(&self) -> f64 {
        self.points.windows(2).map(|w| (w[1].0 - w[0].0).hypot(w[1].1 - w[0].1)).sum()
    }

    /// One point per line, `x y`.
    pub fn from_text(text: &str) -> Result<Self, String> {
        let mut pts = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let v: Vec<f64> = line
                .split_whitespace()
                .map(|t| t.parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|_| format!("line {}: expected two numbers", n + 1))?;
            if v.len() != 2 {
                return Err(format!("line {}: expected two numbers", n + 1));
            }
            pts.push((v[0], v[1]));
        }
        if pts.len() < 2 {
            return Err("curve needs at least two points".into());
        }
        Ok(Self::new(pts))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveConfig {
    /// Chord length above which a segment is bisected.
    pub delta: f64,
    pub initial_segments: usize,
    /// Segment cap per iterate; beyond it the run stops and is flagged partial.
    pub max_segments: usize,
    pub max_depth: u32,
}

impl Default for CurveConfig {
    fn default() -> Self {
        Self { delta: 0.05, initial_segments: 1024, max_segments: 400_000_000, max_depth: 52 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveGrowth {
    /// (k, length of φ^k(L), segments used).
    pub lengths: Vec<(usize, f64, usize)>,
    pub partial: bool,
}

fn iterate(m: &TwistMapModel, p: (f64, f64), k: usize) -> (f64, f64) {
    let (mut x, mut y) = p;
    for _ in 0..k {
        (x, y) = m.step(x, y);
    }
    (x, y)
}

/// Length of φ^k ∘ γ on [s0, s1] by depth-first bisection; returns (length, segments).
fn segment_length(m: &TwistMapModel, l: &Polyline, k: usize, s0: f64, s1: f64, cfg: &CurveConfig, cap: usize) -> (f64, usize) {
    let pa = iterate(m, l.eval(s0), k);
    let pb = iterate(m, l.eval(s1), k);
    let mut stack = vec![(s0, pa, s1, pb, 0u32)];
    let mut len = 0.0;
    let mut segs = 0usize;
    while let Some((a, pa, b, pb, depth)) = stack.pop() {
        let d = (pb.0 - pa.0).hypot(pb.1 - pa.1);
        if d > cfg.delta && depth < cfg.max_depth && segs < cap {
            let mid = 0.5 * (a + b);
            let pm = iterate(m, l.eval(mid), k);
            stack.push((mid, pm, b, pb, depth + 1));
            stack.push((a, pa, mid, pm, depth + 1));
        } else {
            len += d;
            segs += 1;
        }
    }
    (len, segs)
}

/// Arclength of φ^k(L) for k = 0..=k_max, each iterate refined from scratch.
pub fn curve_volume_growth(m: &TwistMapModel, l: &Polyline, k_max: usize, cfg: &CurveConfig) -> CurveGrowth {
    let n = cfg.initial_segments.max(1);
    let mut lengths = Vec::new();
    let mut partial = false;
    for k in 0..=k_max {
        let parts: Vec<(f64, usize)> = (0..n)
            .into_par_iter()
            .map(|i| segment_length(m, l, k, i as f64 / n as f64, (i + 1) as f64 / n as f64, cfg, cfg.max_segments))
            .collect();
        let len: f64 = parts.iter().map(|p| p.0).sum();
        let segs: usize = parts.iter().map(|p| p.1).sum();
        if segs >= cfg.max_segments || parts.iter().any(|p| p.1 >= cfg.max_segments) {
            partial = true;
            break;
        }
        lengths.push((k, len, segs));
    }
    CurveGrowth { lengths, partial }
}

/// Mean of √(2 + |Dφ^k|²_F) over an n×n grid of the unit cell: the area of the graph of φ^k.
pub fn graph_volume(m: &TwistMapModel, k: usize, n: usize) -> f64 {
    let total: f64 = (0..n * n)
        .into_par_iter()
        .map(|i| {
            let mut t = Tangent::at(((i / n) as f64 + 0.5) / n as f64, ((i % n) as f64 + 0.5) / n as f64);
            for _ in 0..k {
                t = m.forward(t);
            }
            let f2: f64 = t.j.iter().flatten().map(|v| v * v).sum();
            (2.0 + f2).sqrt()
        })
        .collect::<Vec<f64>>()
        .iter()
        .sum();
    total / (n * n) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_shear_keep_the_zero_section() {
        let cfg = CurveConfig { initial_segments: 8, ..CurveConfig::default() };
        for m in [TwistMapModel::identity(), TwistMapModel::shear()] {
            let g = curve_volume_growth(&m, &Polyline::zero_section(), 6, &cfg);
            assert!(g.lengths.iter().all(|(_, l, _)| *l == 1.0));
        }
    }

    #[test]
    fn shear_stretches_vertical_segments_linearly() {
        let cfg = CurveConfig { initial_segments: 8, ..CurveConfig::default() };
        let g = curve_volume_growth(&TwistMapModel::shear(), &Polyline::vertical(0.0, 0.0, 1.0), 8, &cfg);
        for (k, l, _) in &g.lengths {
            let exact = (1.0 + (*k as f64).powi(2)).sqrt();
            assert!((l - exact).abs() < 1e-9, "{k} {l}");
        }
    }

    #[test]
    fn budget_flags_partial_runs() {
        let cfg = CurveConfig { max_segments: 2000, initial_segments: 16, ..CurveConfig::default() };
        let g = curve_volume_growth(&TwistMapModel::standard(6.0), &Polyline::zero_section(), 10, &cfg);
        assert!(g.partial && g.lengths.len() < 11);
    }

    #[test]
    fn graph_volume_of_identity() {
        assert!((graph_volume(&TwistMapModel::identity(), 3, 8) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn polyline_text() {
        let p = Polyline::from_text("0 0\n# c\n0.5 1\n").unwrap();
        assert_eq!(p.eval(0.5), (0.25, 0.5));
        assert!(Polyline::from_text("0 0\n1\n").is_err());
    }
}
