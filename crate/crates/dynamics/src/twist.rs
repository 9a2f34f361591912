//! Area-preserving twist maps given by generating functions.

use std::f64::consts::PI;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unknown model `{0}`")]
    UnknownModel(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    /// Only orbits returning with zero vertical winding.
    Cylinder,
    Torus,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MapKind {
    /// Chirikov standard map; K = 0 is the integrable shear (x, y) ↦ (x + y, y).
    Standard { k: f64 },
    Identity,
}

/// A map (x, y) ↦ (x', y') with y' = y - c·sin(2πx), x' = x + y', c = K/2π.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwistMapModel {
    pub kind: MapKind,
    pub domain: Domain,
}

/// Point together with the Jacobian of the map applied so far.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tangent {
    pub x: f64,
    pub y: f64,
    pub j: [[f64; 2]; 2],
}

impl Tangent {
    pub fn at(x: f64, y: f64) -> Self {
        Self { x, y, j: [[1.0, 0.0], [0.0, 1.0]] }
    }
}

impl TwistMapModel {
    pub fn standard(k: f64) -> Self {
        Self { kind: MapKind::Standard { k }, domain: Domain::Torus }
    }

    pub fn shear() -> Self {
        Self::standard(0.0)
    }

    pub fn identity() -> Self {
        Self { kind: MapKind::Identity, domain: Domain::Torus }
    }

    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = domain;
        self
    }

    /// The kick strength K, or `None` for the identity.
    pub fn kick(&self) -> Option<f64> {
        match self.kind {
            MapKind::Standard { k } => Some(k),
            MapKind::Identity => None,
        }
    }

    fn c(&self) -> f64 {
        self.kick().unwrap_or(0.0) / (2.0 * PI)
    }

    /// Every point is periodic with parabolic monodromy: identity and K = 0.
    pub fn is_integrable(&self) -> bool {
        self.kick().is_none_or(|k| k == 0.0)
    }

    pub fn step(&self, x: f64, y: f64) -> (f64, f64) {
        match self.kind {
            MapKind::Identity => (x, y),
            MapKind::Standard { .. } => {
                let y2 = y - self.c() * (2.0 * PI * x).sin();
                (x + y2, y2)
            }
        }
    }

    pub fn step_back(&self, x: f64, y: f64) -> (f64, f64) {
        match self.kind {
            MapKind::Identity => (x, y),
            MapKind::Standard { .. } => {
                let x0 = x - y;
                (x0, y + self.c() * (2.0 * PI * x0).sin())
            }
        }
    }

    /// Applies φ and its derivative: dy' = dy - K cos(2πx) dx, dx' = dx + dy'.
    pub fn forward(&self, s: Tangent) -> Tangent {
        if let MapKind::Identity = self.kind {
            return s;
        }
        let k = 2.0 * PI * self.c();
        let cs = (2.0 * PI * s.x).cos();
        let (x, y) = self.step(s.x, s.y);
        let mut j = [[0.0; 2]; 2];
        for col in 0..2 {
            let dyp = s.j[1][col] - k * cs * s.j[0][col];
            j[0][col] = s.j[0][col] + dyp;
            j[1][col] = dyp;
        }
        Tangent { x, y, j }
    }

    pub fn backward(&self, s: Tangent) -> Tangent {
        if let MapKind::Identity = self.kind {
            return s;
        }
        let k = 2.0 * PI * self.c();
        let (x, y) = self.step_back(s.x, s.y);
        let cs = (2.0 * PI * x).cos();
        let mut j = [[0.0; 2]; 2];
        for col in 0..2 {
            let dx = s.j[0][col] - s.j[1][col];
            j[0][col] = dx;
            j[1][col] = s.j[1][col] + k * cs * dx;
        }
        Tangent { x, y, j }
    }

    /// The drift half of φ = drift ∘ kick.
    pub fn drift(&self, s: Tangent) -> Tangent {
        let mut j = s.j;
        for col in 0..2 {
            j[0][col] = s.j[0][col] + s.j[1][col];
        }
        Tangent { x: s.x + s.y, y: s.y, j }
    }

    /// The inverse of the kick half of φ.
    pub fn unkick(&self, s: Tangent) -> Tangent {
        let k = 2.0 * PI * self.c();
        let cs = (2.0 * PI * s.x).cos();
        let mut j = s.j;
        for col in 0..2 {
            j[1][col] = s.j[1][col] + k * cs * s.j[0][col];
        }
        Tangent { x: s.x, y: s.y + self.c() * (2.0 * PI * s.x).sin(), j }
    }

    /// Generating function h(x, x') = ½(x' - x)² + (K/4π²)·cos(2πx).
    pub fn h(&self, x: f64, xp: f64) -> f64 {
        let k = self.kick().unwrap_or(0.0);
        0.5 * (xp - x).powi(2) + k / (4.0 * PI * PI) * (2.0 * PI * x).cos()
    }

    /// Mixed derivative ∂²h/∂x∂x' by central differences.
    pub fn mixed_derivative(&self, x: f64, xp: f64) -> f64 {
        let e = 1e-4;
        (self.h(x + e, xp + e) - self.h(x + e, xp - e) - self.h(x - e, xp + e) + self.h(x - e, xp - e)) / (4.0 * e * e)
    }

    /// Checks ∂²h/∂x∂x' < 0 on an n×n grid of the window [0,1]×[-1,2]; the identity has no generating function.
    pub fn twist_condition(&self, n: usize) -> bool {
        if let MapKind::Identity = self.kind {
            return false;
        }
        (0..n).all(|i| {
            (0..n).all(|j| {
                let x = i as f64 / n as f64;
                let xp = -1.0 + 3.0 * j as f64 / n as f64;
                self.mixed_derivative(x, xp) < -0.5
            })
        })
    }

    /// Mean base-2 Lyapunov exponent over an n×n grid of starting points, `steps` iterates each.
    pub fn lyapunov_exponent(&self, n: usize, steps: usize) -> f64 {
        let mut total = 0.0;
        for i in 0..n * n {
            let mut t = Tangent::at(((i / n) as f64 + 0.5) / n as f64, ((i % n) as f64 + 0.5) / n as f64);
            let mut log = 0.0;
            for _ in 0..steps {
                t = self.forward(t);
                let norm = t.j[0][0].hypot(t.j[1][0]);
                log += norm.log2();
                t.j = [[t.j[0][0] / norm, 0.0], [t.j[1][0] / norm, 1.0]];
            }
            total += log / steps as f64;
        }
        total / (n * n) as f64
    }

    /// Map spec text: `model`, `K`, `domain` lines.
    pub fn to_spec(&self) -> String {
        let domain = match self.domain {
            Domain::Torus => "torus",
            Domain::Cylinder => "cylinder",
        };
        match self.kind {
            MapKind::Standard { k } => format!("model standard\nK {k}\ndomain {domain}\n"),
            MapKind::Identity => format!("model identity\ndomain {domain}\n"),
        }
    }

    pub fn from_spec(text: &str) -> Result<Self, ModelError> {
        let mut model: Option<String> = None;
        let mut k = None;
        let mut domain = Domain::Torus;
        for (n, raw) in text.lines().enumerate() {
            let err = |m: &str| ModelError::Parse { line: n + 1, message: m.to_string() };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once(char::is_whitespace).ok_or_else(|| err("expected `key value`"))?;
            match key {
                "model" => model = Some(value.trim().to_string()),
                "K" => k = Some(value.trim().parse::<f64>().map_err(|_| err("bad K"))?),
                "domain" => {
                    domain = match value.trim() {
                        "torus" => Domain::Torus,
                        "cylinder" => Domain::Cylinder,
                        _ => return Err(err("domain must be torus or cylinder")),
                    }
                }
                other => return Err(err(&format!("unknown key `{other}`"))),
            }
        }
        let kind = match model.as_deref() {
            Some("standard") => MapKind::Standard { k: k.unwrap_or(0.0) },
            Some("shear") => MapKind::Standard { k: 0.0 },
            Some("identity") => MapKind::Identity,
            Some(other) => return Err(ModelError::UnknownModel(other.to_string())),
            None => return Err(ModelError::Parse { line: 0, message: "missing model line".into() }),
        };
        Ok(Self { kind, domain })
    }
}

impl fmt::Display for TwistMapModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            MapKind::Standard { k } if k == 0.0 => write!(f, "shear"),
            MapKind::Standard { k } => write!(f, "standard(K={k})"),
            MapKind::Identity => write!(f, "identity"),
        }
    }
}
