//! Monte-Carlo intersection counts against a tomograph family of graphs on the annulus T × ℝ.
//!
//! The family is L_s = {(x, F_s(x))} with F_s(x) = s_0 + Σ_ℓ s_ℓ g_ℓ'(x), s_0 ∈ [-R, R] and
//! (s_1, …, s_d) in the ball of radius r.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::curves::Polyline;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Basis {
    /// g = cos(2πjx)/(2πj), g' = -sin(2πjx).
    Cos(u32),
    /// g = -sin(2πjx)/(2πj), g' = -cos(2πjx).
    Sin(u32),
}

impl Basis {
    pub fn derivative(&self, x: f64) -> f64 {
        match *self {
            Basis::Cos(j) => -(2.0 * PI * j as f64 * x).sin(),
            Basis::Sin(j) => -(2.0 * PI * j as f64 * x).cos(),
        }
    }

    /// max |g''|.
    pub fn curvature_bound(&self) -> f64 {
        match *self {
            Basis::Cos(j) | Basis::Sin(j) => 2.0 * PI * j as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TomographSpec {
    pub translate: f64,
    pub radius: f64,
    pub basis: Vec<Basis>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CroftonError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("family is not a submersion: {0}")]
    NotSubmersion(String),
    #[error("sample count must be positive")]
    NoSamples,
    #[error("curve has zero length")]
    DegenerateCurve,
}

impl TomographSpec {
    /// Lines `translate R`, `radius r`, `basis cos j` / `basis sin j`.
    pub fn from_text(text: &str) -> Result<Self, CroftonError> {
        let mut spec = TomographSpec { translate: 0.0, radius: 0.0, basis: Vec::new() };
        for (n, raw) in text.lines().enumerate() {
            let err = |m: &str| CroftonError::Parse { line: n + 1, message: m.to_string() };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let t: Vec<&str> = line.split_whitespace().collect();
            let num = |s: &str| s.parse::<f64>().map_err(|_| err("expected a number"));
            match t.as_slice() {
                ["translate", v] => spec.translate = num(v)?,
                ["radius", v] => spec.radius = num(v)?,
                ["basis", kind, j] => {
                    let j: u32 = j.parse().ok().filter(|j| *j > 0).ok_or_else(|| err("frequency must be a positive integer"))?;
                    spec.basis.push(match *kind {
                        "cos" => Basis::Cos(j),
                        "sin" => Basis::Sin(j),
                        _ => return Err(err("basis must be cos or sin")),
                    });
                }
                _ => return Err(err("unknown line")),
            }
        }
        Ok(spec)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("translate {}\nradius {}\n", self.translate, self.radius);
        for b in &self.basis {
            match b {
                Basis::Cos(j) => s += &format!("basis cos {j}\n"),
                Basis::Sin(j) => s += &format!("basis sin {j}\n"),
            }
        }
        s
    }

    /// (x, s) ↦ (x, F_s(x)) must have surjective differential: ∂F/∂s ≠ 0 at every sampled x.
    pub fn validate(&self, grid: usize) -> Result<(), CroftonError> {
        if self.translate <= 0.0 {
            if self.basis.is_empty() || self.radius <= 0.0 {
                return Err(CroftonError::NotSubmersion("no parameters".into()));
            }
            for i in 0..grid {
                let x = i as f64 / grid as f64;
                if self.basis.iter().all(|b| b.derivative(x).abs() < 1e-9) {
                    return Err(CroftonError::NotSubmersion(format!("all ∂F/∂s vanish at x = {x}")));
                }
            }
            return Err(CroftonError::NotSubmersion("a translation parameter is required for the bound".into()));
        }
        if !self.basis.is_empty() && self.radius <= 0.0 {
            return Err(CroftonError::NotSubmersion("basis given with zero radius".into()));
        }
        Ok(())
    }

    fn ball_volume(&self) -> f64 {
        let d = self.basis.len();
        // π^{d/2} r^d / Γ(d/2 + 1)
        let (mut gamma, mut a) = if d.is_multiple_of(2) { (1.0, 1.0) } else { (PI.sqrt() / 2.0, 1.5) };
        while a < d as f64 / 2.0 + 0.75 {
            gamma *= a;
            a += 1.0;
        }
        PI.powf(d as f64 / 2.0) * self.radius.powi(d as i32) / gamma
    }

    /// vol(B).
    pub fn parameter_volume(&self) -> f64 {
        2.0 * self.translate * self.ball_volume()
    }

    /// Family constant C with ∫_B N(s) ds ≤ C · length(L').
    pub fn constant(&self) -> f64 {
        let curv: f64 = self.basis.iter().map(|b| b.curvature_bound().powi(2)).sum();
        self.ball_volume() * (1.0 + self.radius * self.radius * curv).sqrt()
    }

    pub fn eval(&self, s: &[f64], x: f64) -> f64 {
        s[0] + self.basis.iter().zip(&s[1..]).map(|(b, c)| c * b.derivative(x)).sum::<f64>()
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        let mut s = vec![rng.gen_range(-self.translate..self.translate)];
        let d = self.basis.len();
        if d > 0 {
            loop {
                let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-self.radius..self.radius)).collect();
                if v.iter().map(|c| c * c).sum::<f64>() <= self.radius * self.radius {
                    s.extend(v);
                    break;
                }
            }
        }
        s
    }
}

/// Number of sign changes of y - F_s(x) along the resampled curve; `None` if a sample lies on L_s.
fn crossings(spec: &TomographSpec, s: &[f64], pts: &[(f64, f64)]) -> Option<usize> {
    let mut count = 0;
    let mut prev: Option<f64> = None;
    for &(x, y) in pts {
        let g = y - spec.eval(s, x);
        if g.abs() < 1e-12 {
            return None;
        }
        if let Some(p) = prev {
            if (p > 0.0) != (g > 0.0) {
                count += 1;
            }
        }
        prev = Some(g);
    }
    Some(count)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CroftonReport {
    pub length: f64,
    pub mean_crossings: f64,
    /// ∫_B N(s) ds estimated as mean N · vol(B).
    pub integral: f64,
    pub ratio: f64,
    pub constant: f64,
    pub resampled: usize,
    /// Histogram of N(s): index = count.
    pub histogram: Vec<usize>,
}

pub const RESOLUTION: usize = 4096;

/// Monte-Carlo estimate of ∫_B N(s) ds / length(L').
pub fn crofton_check(spec: &TomographSpec, curve: &Polyline, samples: usize, seed: u64) -> Result<CroftonReport, CroftonError> {
    spec.validate(1024)?;
    if samples == 0 {
        return Err(CroftonError::NoSamples);
    }
    let length = curve.length();
    if length <= 0.0 {
        return Err(CroftonError::DegenerateCurve);
    }
    let pts: Vec<(f64, f64)> = (0..=RESOLUTION).map(|i| curve.eval(i as f64 / RESOLUTION as f64)).collect();
    let chunks = 64usize;
    let per: Vec<(Vec<usize>, usize)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let n = samples / chunks + usize::from(c < samples % chunks);
            let mut counts = Vec::with_capacity(n);
            let mut resampled = 0;
            while counts.len() < n {
                let s = spec.sample(&mut rng);
                match crossings(spec, &s, &pts) {
                    Some(k) => counts.push(k),
                    None => resampled += 1,
                }
            }
            (counts, resampled)
        })
        .collect();
    let mut histogram = Vec::new();
    let mut total = 0usize;
    let mut resampled = 0;
    for (counts, r) in &per {
        resampled += r;
        for &k in counts {
            if histogram.len() <= k {
                histogram.resize(k + 1, 0);
            }
            histogram[k] += 1;
            total += k;
        }
    }
    let mean = total as f64 / samples as f64;
    let integral = mean * spec.parameter_volume();
    Ok(CroftonReport {
        length,
        mean_crossings: mean,
        integral,
        ratio: integral / length,
        constant: spec.constant(),
        resampled,
        histogram,
    })
}

/// Ten test curves: horizontal circles, wiggles of frequency 1..8, contractible circles, a mixed curve.
pub fn curve_suite() -> Vec<(String, Polyline)> {
    let n = 2048;
    let graph = |f: &dyn Fn(f64) -> f64| Polyline::new((0..=n).map(|i| i as f64 / n as f64).map(|x| (x, f(x))).collect());
    let circle = |cx: f64, cy: f64, r: f64| {
        Polyline::new(
            (0..=n)
                .map(|i| 2.0 * PI * i as f64 / n as f64)
                .map(|t| (cx + r * t.cos(), cy + r * t.sin()))
                .collect(),
        )
    };
    let mut v = vec![
        ("horizontal_-0.5".to_string(), Polyline::horizontal(-0.5)),
        ("horizontal_0".to_string(), Polyline::horizontal(0.0)),
        ("horizontal_0.5".to_string(), Polyline::horizontal(0.5)),
    ];
    for j in [1u32, 2, 4, 8] {
        v.push((format!("wiggle_{j}"), graph(&|x| 0.3 * (2.0 * PI * j as f64 * x).sin())));
    }
    v.push(("circle_0.2".into(), circle(0.5, 0.0, 0.2)));
    v.push(("circle_0.4".into(), circle(0.5, 0.0, 0.4)));
    v.push(("mixed".into(), graph(&|x| 0.2 * (2.0 * PI * x).cos() + 0.1 * (2.0 * PI * 3.0 * x).sin())));
    v
}
