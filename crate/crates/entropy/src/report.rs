//! Entropy reports and their CSV, JSON and SVG forms.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use floer_core::rational::{format as format_q, to_f64};
use floer_core::Q;
use serde::{Serialize, Serializer};

use crate::estimators::{BarcodeEntropy, GammaBound, Verdicts};
use crate::growth::{log_plus, GrowthFit};

pub(crate) fn ser_q<S: Serializer>(q: &Q, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_q(q))
}

pub(crate) fn ser_q_vec<S: Serializer>(v: &[Q], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(format_q))
}

pub(crate) fn ser_kq_vec<S: Serializer>(v: &[(usize, Q)], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|(k, q)| (*k, format_q(q))))
}

/// Exact form for short fractions, otherwise ten significant digits.
fn eps_label(q: &Q) -> String {
    if *q.denom() <= 1_000_000 {
        format_q(q)
    } else {
        format!("{:.9e}", to_f64(q))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyReport {
    pub label: String,
    pub barcode: Option<BarcodeEntropy>,
    pub orbit: Option<GrowthFit>,
    pub hyperbolic: Option<GrowthFit>,
    pub volume: Option<GrowthFit>,
    pub point_counts: Vec<(usize, usize)>,
    pub lengths: Vec<(usize, f64)>,
    pub gamma: Option<GammaBound>,
    pub verdicts: Verdicts,
    /// Subsampled-rate ratios, logged only.
    pub subsampling: Vec<(usize, Option<f64>)>,
    pub warnings: Vec<String>,
}

impl EntropyReport {
    fn ks(&self) -> Vec<usize> {
        let mut ks = BTreeSet::new();
        if let Some(b) = &self.barcode {
            ks.extend(b.boundary_depth.iter().map(|p| p.0));
        }
        ks.extend(self.point_counts.iter().map(|p| p.0));
        ks.extend(self.lengths.iter().map(|p| p.0));
        ks.into_iter().collect()
    }

    /// Columns k, one b_eps column per ε, p, length, beta_max.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("k");
        if let Some(b) = &self.barcode {
            for r in &b.rows {
                let _ = write!(s, ",b_eps={}", eps_label(&r.eps));
            }
        }
        s.push_str(",p,length,beta_max\n");
        for k in self.ks() {
            let _ = write!(s, "{k}");
            if let Some(b) = &self.barcode {
                for r in &b.rows {
                    match r.counts.iter().find(|c| c.0 == k) {
                        Some(c) => {
                            let _ = write!(s, ",{}", c.1);
                        }
                        None => s.push(','),
                    }
                }
            }
            let p = self.point_counts.iter().find(|c| c.0 == k).map(|c| c.1.to_string()).unwrap_or_default();
            let l = self.lengths.iter().find(|c| c.0 == k).map(|c| format!("{:.9e}", c.1)).unwrap_or_default();
            let beta = self
                .barcode
                .as_ref()
                .and_then(|b| b.boundary_depth.iter().find(|c| c.0 == k))
                .map(|c| format!("{:.12}", to_f64(&c.1)))
                .unwrap_or_default();
            let _ = writeln!(s, ",{p},{l},{beta}");
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// log⁺ of each series against k.
    pub fn to_svg(&self) -> String {
        let mut series: Vec<(&str, &str, Vec<(f64, f64)>)> = Vec::new();
        if let Some(b) = &self.barcode {
            if let Some(r) = b.rows.last() {
                series.push(("b_eps", "#1f77b4", r.counts.iter().map(|(k, c)| (*k as f64, log_plus(*c as f64))).collect()));
            }
        }
        series.push(("p(k)", "#d62728", self.point_counts.iter().map(|(k, c)| (*k as f64, log_plus(*c as f64))).collect()));
        series.push(("length", "#2ca02c", self.lengths.iter().map(|(k, l)| (*k as f64, log_plus(*l))).collect()));
        let all: Vec<(f64, f64)> = series.iter().flat_map(|s| s.2.iter().copied()).collect();
        let xmax = all.iter().map(|p| p.0).fold(1.0, f64::max);
        let ymax = all.iter().map(|p| p.1).fold(1.0, f64::max);
        let (w, h, pad) = (640.0, 400.0, 40.0);
        let sx = |x: f64| pad + x / xmax * (w - 2.0 * pad);
        let sy = |y: f64| h - pad - y / ymax * (h - 2.0 * pad);
        let mut s = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n\
             <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
             <text x=\"{pad}\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">{} (log2 vs k)</text>\n\
             <line x1=\"{pad}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n\
             <line x1=\"{pad}\" y1=\"{pad}\" x2=\"{pad}\" y2=\"{}\" stroke=\"black\"/>\n",
            self.label,
            h - pad,
            w - pad,
            h - pad,
            h - pad
        );
        for (i, (name, color, pts)) in series.iter().enumerate() {
            if pts.is_empty() {
                continue;
            }
            let path: Vec<String> = pts.iter().map(|(x, y)| format!("{:.2},{:.2}", sx(*x), sy(*y))).collect();
            let _ = writeln!(s, "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"2\" points=\"{}\"/>", path.join(" "));
            let _ = writeln!(
                s,
                "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" fill=\"{color}\">{name}</text>",
                w - 120.0,
                pad + 16.0 * i as f64
            );
        }
        s.push_str("</svg>\n");
        s
    }
}
