//! Periodic orbits of twist maps on the torus: adaptive box search, Newton refinement,
//! variational polishing and orbit records.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::twist::{Domain, Tangent, TwistMapModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    Elliptic,
    Hyperbolic,
    Parabolic,
}

impl Stability {
    pub fn from_trace(t: f64) -> Self {
        if (t.abs() - 2.0).abs() < 1e-9 {
            Stability::Parabolic
        } else if t.abs() < 2.0 {
            Stability::Elliptic
        } else {
            Stability::Hyperbolic
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Stability::Elliptic => "elliptic",
            Stability::Hyperbolic => "hyperbolic",
            Stability::Parabolic => "parabolic",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum OrbitData {
    /// Lifted sequence x_0..x_{k-1} with x_{i+k} = x_i + m (+ i·n) and vertical winding n.
    Twist { sequence: Vec<f64>, points: Vec<(f64, f64)>, m: i64, n: i64 },
    Symbolic { word: Vec<u8> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitRecord {
    pub period: usize,
    pub minimal_period: usize,
    pub class: String,
    pub action: f64,
    pub trace: f64,
    pub residue: f64,
    pub stability: Stability,
    /// Largest critical-point equation residual.
    pub residual: f64,
    /// Number of negative Hessian eigenvalues of the discrete action (zero-winding classes).
    pub morse_index: Option<usize>,
    pub data: OrbitData,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub evaluations: usize,
    pub newton_runs: usize,
    pub newton_failures: usize,
    pub levels: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitTable {
    pub period: usize,
    pub records: Vec<OrbitRecord>,
    /// Periodic points fill curves (identity, K = 0); no isolated orbits are listed.
    pub degenerate: bool,
    pub excluded_parabolic: usize,
    /// The search stopped at its box budget; counts are lower bounds.
    pub partial: bool,
    pub stats: SearchStats,
}

impl OrbitTable {
    /// p(k): number of k-periodic points.
    pub fn point_count(&self) -> usize {
        self.records.iter().map(|r| r.minimal_period).sum()
    }

    pub fn hyperbolic_point_count(&self) -> usize {
        self.records.iter().filter(|r| r.stability == Stability::Hyperbolic).map(|r| r.minimal_period).sum()
    }

    /// CSV with columns period, class, minimal_period, points, action, trace, type, residue.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("period,class,minimal_period,points,action,trace,type,residue\n");
        for r in &self.records {
            let points = match &r.data {
                OrbitData::Twist { points, .. } => {
                    points.iter().map(|(x, y)| format!("{x:.12} {y:.12}")).collect::<Vec<_>>().join(";")
                }
                OrbitData::Symbolic { word } => word.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(""),
            };
            let _ = writeln!(
                s,
                "{},{},{},{},{:.12},{:.9e},{},{:.9e}",
                r.period,
                r.class,
                r.minimal_period,
                points,
                r.action,
                r.trace,
                r.stability.as_str(),
                r.residue
            );
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    /// Initial boxes per side of the unit cell.
    pub grid: usize,
    /// Exclusion test |Ψ| > safety·r + quadratic·r² for a box of linearized radius r.
    pub safety: f64,
    pub quadratic: f64,
    /// Newton is started once the linearized radius drops below this value.
    pub newton_radius: f64,
    /// Boxes whose predicted Newton step leaves `prediction_margin` half-widths are skipped.
    pub prediction_margin: f64,
    pub max_level: usize,
    /// Box evaluation budget, split evenly over the initial cells.
    pub max_boxes: usize,
    pub tolerance: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            grid: 64,
            safety: 1.5,
            quadratic: 6.0,
            newton_radius: 0.25,
            prediction_margin: 2.0,
            max_level: 40,
            max_boxes: 2_000_000_000,
            tolerance: 1e-11,
        }
    }
}

/// Ψ(z) = φ^a(z) - φ^{-b}(z) with a = ⌈k/2⌉, b = ⌊k/2⌋; for odd k the extra step is split into
/// drift and kick halves. Returns Ψ, DΨ and the backward endpoint, which is the periodic point.
fn psi(m: &TwistMapModel, x: f64, y: f64, k: usize) -> ([f64; 2], [[f64; 2]; 2], (f64, f64)) {
    let b = k / 2;
    let mut f = Tangent::at(x, y);
    let mut g = Tangent::at(x, y);
    if k % 2 == 1 {
        f = m.drift(f);
        g = m.unkick(g);
    }
    for _ in 0..b {
        f = m.forward(f);
        g = m.backward(g);
    }
    let mut j = [[0.0; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            j[r][c] = f.j[r][c] - g.j[r][c];
        }
    }
    ([f.x - g.x, f.y - g.y], j, (g.x, g.y))
}

fn solve2(j: &[[f64; 2]; 2], e: [f64; 2]) -> Option<[f64; 2]> {
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    if det.abs() < 1e-300 || !det.is_finite() {
        return None;
    }
    Some([(j[1][1] * e[0] - j[0][1] * e[1]) / det, (-j[1][0] * e[0] + j[0][0] * e[1]) / det])
}

fn frac_residual(p: [f64; 2]) -> [f64; 2] {
    [p[0] - p[0].round(), p[1] - p[1].round()]
}

fn newton(m: &TwistMapModel, mut x: f64, mut y: f64, k: usize, cap: f64, tol: f64) -> Option<(f64, f64)> {
    for _ in 0..40 {
        let (p, j, w) = psi(m, x, y, k);
        let e = frac_residual(p);
        if e[0].abs() < tol && e[1].abs() < tol {
            return Some((w.0.rem_euclid(1.0), w.1.rem_euclid(1.0)));
        }
        let d = solve2(&j, e)?;
        let step = d[0].hypot(d[1]);
        let s = if step > cap { cap / step } else { 1.0 };
        x -= s * d[0];
        y -= s * d[1];
    }
    None
}

/// Spatial hash of torus points with tolerance matching.
#[derive(Debug, Default)]
pub struct PointIndex {
    cells: HashMap<(i64, i64), Vec<(f64, f64, usize)>>,
}

const CELL: f64 = 1e-6;

fn torus_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

impl PointIndex {
    fn cell(x: f64, y: f64) -> (i64, i64) {
        let n = (1.0 / CELL).round() as i64;
        (((x / CELL).floor() as i64).rem_euclid(n), ((y / CELL).floor() as i64).rem_euclid(n))
    }

    pub fn insert(&mut self, x: f64, y: f64, id: usize) {
        self.cells.entry(Self::cell(x, y)).or_default().push((x, y, id));
    }

    pub fn find(&self, x: f64, y: f64, tol: f64) -> Option<usize> {
        let n = (1.0 / CELL).round() as i64;
        let (cx, cy) = Self::cell(x, y);
        for dx in -1..=1 {
            for dy in -1..=1 {
                let key = ((cx + dx).rem_euclid(n), (cy + dy).rem_euclid(n));
                if let Some(v) = self.cells.get(&key) {
                    for &(px, py, id) in v {
                        if torus_dist(px, x) < tol && torus_dist(py, y) < tol {
                            return Some(id);
                        }
                    }
                }
            }
        }
        None
    }
}

/// Finds the periodic points of φ^k on the unit torus by adaptive box subdivision.
pub fn search_points(m: &TwistMapModel, k: usize, cfg: &SearchConfig) -> (Vec<(f64, f64)>, SearchStats, bool) {
    let n0 = cfg.grid;
    let per_cell = (cfg.max_boxes / (n0 * n0)).max(1);
    let cells: Vec<_> = (0..n0 * n0)
        .into_par_iter()
        .map(|i| {
            let root = (((i / n0) as f64 + 0.5) / n0 as f64, ((i % n0) as f64 + 0.5) / n0 as f64);
            search_cell(m, k, cfg, root, 0.5 / n0 as f64, per_cell)
        })
        .collect();
    let mut stats = SearchStats::default();
    let mut found = Vec::new();
    let mut partial = false;
    for (pts, s, p) in cells {
        found.extend(pts);
        stats.evaluations += s.evaluations;
        stats.newton_runs += s.newton_runs;
        stats.newton_failures += s.newton_failures;
        stats.levels = stats.levels.max(s.levels);
        partial |= p;
    }
    found.sort_by(|a, b| a.partial_cmp(b).unwrap());
    (found, stats, partial)
}

/// Depth-first subdivision of one initial cell with its own evaluation budget.
fn search_cell(
    m: &TwistMapModel,
    k: usize,
    cfg: &SearchConfig,
    root: (f64, f64),
    w0: f64,
    budget: usize,
) -> (Vec<(f64, f64)>, SearchStats, bool) {
    let mut stats = SearchStats::default();
    let mut found = Vec::new();
    let mut stack = vec![(root.0, root.1, w0, 0usize)];
    while let Some((x, y, w, level)) = stack.pop() {
        if stats.evaluations >= budget {
            return (found, stats, true);
        }
        stats.evaluations += 1;
        stats.levels = stats.levels.max(level + 1);
        let (p, j, _) = psi(m, x, y, k);
        let e = frac_residual(p);
        let r0 = (j[0][0].abs() + j[0][1].abs()) * w;
        let r1 = (j[1][0].abs() + j[1][1].abs()) * w;
        if e[0].abs() > cfg.safety * r0 + cfg.quadratic * r0 * r0 + 1e-12
            || e[1].abs() > cfg.safety * r1 + cfg.quadratic * r1 * r1 + 1e-12
        {
            continue;
        }
        if r0.max(r1) < cfg.newton_radius {
            let Some(d) = solve2(&j, e) else { continue };
            if d[0].abs() > cfg.prediction_margin * w || d[1].abs() > cfg.prediction_margin * w {
                continue;
            }
            stats.newton_runs += 1;
            match newton(m, x, y, k, 3.0 * w, cfg.tolerance) {
                Some(pt) => found.push(pt),
                None => stats.newton_failures += 1,
            }
            continue;
        }
        if level + 1 >= cfg.max_level {
            continue;
        }
        let h = w / 2.0;
        for (dx, dy) in [(-h, -h), (-h, h), (h, -h), (h, h)] {
            stack.push((x + dx, y + dy, h, level + 1));
        }
    }
    (found, stats, false)
}

/// Residual of x_{i+1} - 2x_i + x_{i-1} + c·sin(2πx_i) with x_k = x_0 + m and x_{-1} = x_{k-1} - m + n.
fn residuals(seq: &[f64], m: i64, n: i64, c: f64) -> Vec<f64> {
    let k = seq.len();
    (0..k)
        .map(|i| {
            let next = if i + 1 < k { seq[i + 1] } else { seq[0] + m as f64 };
            let prev = if i > 0 { seq[i - 1] } else { seq[k - 1] - (m - n) as f64 };
            next - 2.0 * seq[i] + prev + c * (2.0 * PI * seq[i]).sin()
        })
        .collect()
}

/// Hessian of the discrete action W = Σ h(x_i, x_{i+1}) on cyclic sequences.
pub fn action_hessian(seq: &[f64], big_k: f64) -> DMatrix<f64> {
    let k = seq.len();
    let mut h = DMatrix::zeros(k, k);
    for i in 0..k {
        h[(i, i)] += 2.0 - big_k * (2.0 * PI * seq[i]).cos();
        h[(i, (i + 1) % k)] -= 1.0;
        h[(i, (i + k - 1) % k)] -= 1.0;
    }
    h
}

/// Gradient of W, i.e. minus the critical-point residual.
pub fn action_gradient(seq: &[f64], m: i64, c: f64) -> Vec<f64> {
    residuals(seq, m, 0, c).into_iter().map(|r| -r).collect()
}

pub(crate) fn polish(seq: &mut [f64], m: i64, n: i64, big_k: f64) -> f64 {
    let c = big_k / (2.0 * PI);
    for _ in 0..20 {
        let r = residuals(seq, m, n, c);
        let worst = r.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        if worst < 1e-13 {
            break;
        }
        let jac = -action_hessian(seq, big_k);
        let Some(d) = jac.lu().solve(&DVector::from_vec(r)) else { break };
        for (x, dx) in seq.iter_mut().zip(d.iter()) {
            *x -= dx;
        }
    }
    residuals(seq, m, n, c).iter().fold(0.0f64, |a, b| a.max(b.abs()))
}

/// Point (x_r, y_r) mod 1 of the r-th shift, with y_r = x_r - x_{r-1}.
pub fn shift_point(seq: &[f64], m: i64, n: i64, r: usize) -> (f64, f64) {
    let k = seq.len();
    let xr = seq[r % k];
    let prev = if !r.is_multiple_of(k) { seq[r % k - 1] } else { seq[k - 1] - (m - n) as f64 };
    (xr.rem_euclid(1.0), (xr - prev).rem_euclid(1.0))
}

pub(crate) fn discrete_action(m: &TwistMapModel, seq: &[f64], wrap: i64) -> f64 {
    let k = seq.len();
    (0..k).map(|i| m.h(seq[i], if i + 1 < k { seq[i + 1] } else { seq[0] + wrap as f64 })).sum()
}

fn build_record(m: &TwistMapModel, k: usize, w: (f64, f64)) -> Option<OrbitRecord> {
    let big_k = m.kick()?;
    let mut xs = Vec::with_capacity(k + 1);
    let (mut x, mut y) = w;
    let y0 = y;
    xs.push(x);
    for _ in 0..k {
        (x, y) = m.step(x, y);
        xs.push(x);
    }
    let n = (y - y0).round() as i64;
    let raw_m = (xs[k] - xs[0]).round() as i64;
    // Lift so that x_k - x_0 lies in [0, k): x_i += i·b.
    let m_c = raw_m.rem_euclid(k as i64);
    let b = (m_c - raw_m) / k as i64;
    let mut seq: Vec<f64> = (0..k).map(|i| xs[i] + (i as i64 * b) as f64).collect();
    let residual = polish(&mut seq, m_c, n, big_k);
    if !residual.is_finite() || residual > 1e-9 {
        return None;
    }
    if m.domain == Domain::Cylinder && n != 0 {
        return None;
    }
    let p0 = shift_point(&seq, m_c, n, 0);
    let mut t = Tangent::at(p0.0, p0.1);
    for _ in 0..k {
        t = m.forward(t);
    }
    let trace = t.j[0][0] + t.j[1][1];
    let mut minimal = k;
    for d in 1..k {
        if k.is_multiple_of(d) {
            let pd = shift_point(&seq, m_c, n, d);
            if torus_dist(pd.0, p0.0) < 1e-8 && torus_dist(pd.1, p0.1) < 1e-8 {
                minimal = d;
                break;
            }
        }
    }
    let points = (0..minimal).map(|r| shift_point(&seq, m_c, n, r)).collect();
    let morse_index = (n == 0).then(|| {
        let eig = action_hessian(&seq, big_k).symmetric_eigenvalues();
        eig.iter().filter(|e| **e < 0.0).count()
    });
    Some(OrbitRecord {
        period: k,
        minimal_period: minimal,
        class: format!("m{m_c}n{n}"),
        action: discrete_action(m, &seq, m_c),
        trace,
        residue: (2.0 - trace) / 4.0,
        stability: Stability::from_trace(trace),
        residual,
        morse_index,
        data: OrbitData::Twist { sequence: seq, points, m: m_c, n },
    })
}

/// Periodic orbits of period k (all points fixed by φ^k), deduplicated modulo cyclic shift.
pub fn find_periodic_orbits(m: &TwistMapModel, k: usize, cfg: &SearchConfig) -> OrbitTable {
    assert!(k >= 1, "period must be positive");
    if m.is_integrable() {
        return OrbitTable {
            period: k,
            records: Vec::new(),
            degenerate: true,
            excluded_parabolic: 0,
            partial: false,
            stats: SearchStats::default(),
        };
    }
    let (found, mut stats, partial) = search_points(m, k, cfg);
    let mut index = PointIndex::default();
    let mut records = Vec::new();
    let mut excluded = 0;
    for &w in &found {
        if index.find(w.0, w.1, 1e-7).is_some() {
            continue;
        }
        let Some(rec) = build_record(m, k, w) else {
            stats.newton_failures += 1;
            continue;
        };
        let id = records.len();
        if let OrbitData::Twist { points, .. } = &rec.data {
            if index.find(points[0].0, points[0].1, 1e-7).is_some() {
                continue;
            }
            for p in points {
                index.insert(p.0, p.1, id);
            }
        }
        index.insert(w.0, w.1, id);
        if rec.stability == Stability::Parabolic {
            excluded += 1;
            records.push(rec);
            continue;
        }
        records.push(rec);
    }
    let records: Vec<OrbitRecord> = if excluded > 0 {
        records.into_iter().filter(|r| r.stability != Stability::Parabolic).collect()
    } else {
        records
    };
    OrbitTable { period: k, records, degenerate: false, excluded_parabolic: excluded, partial, stats }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActionGapReport {
    /// Minimal nonzero action difference per period; `None` when fewer than two actions exist.
    pub per_k: Vec<(usize, Option<f64>)>,
    pub floor: Option<f64>,
    pub bounded_away: bool,
}

/// Differences below this are treated as equal actions.
pub const ACTION_TIE: f64 = 1e-9;

/// Smallest nonzero |A(x) - A(y)| over pairs of distinct orbits, per table.
pub fn action_gap_scan(tables: &[OrbitTable], hyperbolic_only: bool, threshold: f64) -> ActionGapReport {
    let per_k: Vec<(usize, Option<f64>)> = tables
        .iter()
        .map(|t| {
            let mut a: Vec<f64> = t
                .records
                .iter()
                .filter(|r| !hyperbolic_only || r.stability == Stability::Hyperbolic)
                .map(|r| r.action)
                .collect();
            a.sort_by(|x, y| x.partial_cmp(y).unwrap());
            let gap = a.windows(2).map(|w| w[1] - w[0]).filter(|d| *d > ACTION_TIE).fold(None, |acc: Option<f64>, d| {
                Some(acc.map_or(d, |x| x.min(d)))
            });
            (t.period, gap)
        })
        .collect();
    let floor = per_k.iter().filter_map(|(_, g)| *g).fold(None, |acc: Option<f64>, d| Some(acc.map_or(d, |x| x.min(d))));
    ActionGapReport { bounded_away: floor.is_some_and(|f| f > threshold), per_k, floor }
}
