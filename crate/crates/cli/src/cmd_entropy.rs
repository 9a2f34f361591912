use std::fmt::Write as _;
use std::path::Path;

use clap::Args;
use floer_core::barcode::barcode;
use floer_core::rational::format as fq;
use floer_core::{PrimeField, Q};
use floer_dynamics::curves::{curve_volume_growth, CurveConfig, Polyline};
use floer_dynamics::horseshoe::{horseshoe_orbit_table, SymbolicHorseshoe};
use floer_dynamics::orbits::{action_gap_scan, find_periodic_orbits, OrbitTable, SearchConfig};
use floer_dynamics::packages::{build_package_from_orbits, CouplingRule};
use floer_dynamics::twist::TwistMapModel;
use floer_entropy::{
    barcode_entropy_from_barcodes, compare_theorems, gamma_lower_bound, log_eps_grid, orbit_entropy,
    subsampling_ratios, volume_entropy, EntropyReport, GrowthSequence, SeriesKind, TheoremInputs, Tolerance, Window,
};
use serde::Serialize;

use crate::io::{read, CliError, OutputDir, EXIT_BUDGET};
use crate::{parse_q_list, Common, Outcome};

#[derive(Args)]
pub struct EntropyArgs {
    /// Map spec file, or inline: `standard:K=6[,domain=cylinder]`, `shear`, `identity`, `horseshoe[:s=2]`.
    #[arg(long)]
    pub model: String,
    #[arg(long = "k-max")]
    pub k_max: usize,
    #[arg(long = "k-min", default_value_t = 1)]
    pub k_min: usize,
    /// Comma-separated ε grid; logarithmic from the action-gap floor to 10⁻³ when omitted.
    #[arg(long)]
    pub eps: Option<String>,
    #[arg(long = "field-p", default_value_t = 2)]
    pub field_p: u32,
    /// Period group generator; dynamical packages carry Γ = {0}, so only 0 is accepted.
    #[arg(long = "gamma-gen")]
    pub gamma_gen: Option<String>,
    /// zero | morse | planted | far:N. Default: morse for twist maps, zero for the horseshoe.
    #[arg(long)]
    pub coupling: Option<String>,
    /// Largest iterate for curve length growth (defaults to --k-max).
    #[arg(long = "curve-k-max")]
    pub curve_k_max: Option<usize>,
    /// Box evaluation budget of the orbit search, split evenly over the initial cells.
    #[arg(long = "max-boxes", default_value_t = 2_000_000_000)]
    pub max_boxes: usize,
    #[arg(long = "max-segments", default_value_t = 400_000_000)]
    pub max_segments: usize,
    #[arg(long = "rel-tol", default_value_t = 0.15)]
    pub rel_tol: f64,
    #[arg(long = "abs-tol", default_value_t = 0.05)]
    pub abs_tol: f64,
    #[arg(long = "ineq-tol", default_value_t = 0.05)]
    pub ineq_tol: f64,
    /// Also write report.svg.
    #[arg(long)]
    pub svg: bool,
    /// Do not write per-k package files.
    #[arg(long = "skip-packages")]
    pub skip_packages: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Twist(TwistMapModel),
    Horseshoe(usize),
}

impl Model {
    fn describe(&self) -> String {
        match self {
            Model::Twist(m) => m.to_spec().trim_end().replace('\n', "; "),
            Model::Horseshoe(s) => format!("model horseshoe; symbols {s}"),
        }
    }
}

pub fn parse_model(s: &str) -> Result<Model, CliError> {
    let text = if Path::new(s).is_file() { read(Path::new(s))? } else { inline_spec(s)? };
    if text.lines().any(|l| l.split('#').next().unwrap_or("").split_whitespace().eq(["model", "horseshoe"])) {
        let mut symbols = 2;
        for (n, l) in text.lines().enumerate() {
            let t: Vec<&str> = l.split('#').next().unwrap_or("").split_whitespace().collect();
            match t.as_slice() {
                [] | ["model", "horseshoe"] => {}
                ["symbols", v] => {
                    symbols = v.parse().ok().filter(|s| *s >= 2).ok_or_else(|| CliError::parse(format!("line {}: symbols must be ≥ 2", n + 1)))?
                }
                _ => return Err(CliError::parse(format!("line {}: unknown horseshoe key", n + 1))),
            }
        }
        return Ok(Model::Horseshoe(symbols));
    }
    TwistMapModel::from_spec(&text).map(Model::Twist).map_err(|e| match e {
        floer_dynamics::twist::ModelError::Parse { .. } => CliError::parse(e.to_string()),
        other => CliError::validation(other.to_string()),
    })
}

fn inline_spec(s: &str) -> Result<String, CliError> {
    let (name, params) = s.split_once(':').unwrap_or((s, ""));
    let mut out = format!("model {name}\n");
    for p in params.split(',').filter(|p| !p.is_empty()) {
        let (key, value) = match p.split_once('=') {
            Some(kv) => kv,
            None if name == "horseshoe" => ("s", p),
            None => ("K", p),
        };
        match (name, key) {
            ("horseshoe", "s") => out += &format!("symbols {value}\n"),
            (_, "K") => out += &format!("K {value}\n"),
            (_, "domain") => out += &format!("domain {value}\n"),
            _ => return Err(CliError::parse(format!("unknown model parameter `{key}`"))),
        }
    }
    Ok(out)
}

fn parse_coupling(s: Option<&str>, model: &Model) -> Result<CouplingRule, CliError> {
    Ok(match (s, model) {
        (None, Model::Twist(m)) if !m.is_integrable() => CouplingRule::Morse(*m),
        (None, _) | (Some("zero"), _) => CouplingRule::Zero,
        (Some("morse"), Model::Twist(m)) => CouplingRule::Morse(*m),
        (Some("planted"), Model::Horseshoe(_)) => CouplingRule::PlantedPair,
        (Some(f), _) if f.starts_with("far:") => {
            CouplingRule::FarPairs(f[4..].parse().map_err(|_| CliError::parse(format!("bad coupling `{f}`")))?)
        }
        (Some(other), _) => return Err(CliError::validation(format!("coupling `{other}` does not apply to this model"))),
    })
}

/// Everything that determines the outputs.
#[derive(Debug, Serialize)]
pub struct ExperimentConfig {
    pub model: String,
    pub k_min: usize,
    pub k_max: usize,
    pub curve_k_max: usize,
    pub eps: Option<Vec<String>>,
    pub field_p: u32,
    pub coupling: String,
    pub tolerance: Tolerance,
    pub seed: u64,
    pub max_boxes: usize,
    pub max_segments: usize,
    pub svg: bool,
}

pub fn run(a: &EntropyArgs) -> Result<Outcome, CliError> {
    let model = parse_model(&a.model)?;
    if a.k_min == 0 || a.k_min > a.k_max {
        return Err(CliError::validation(format!("k range {}..={} is empty", a.k_min, a.k_max)));
    }
    if let Some(g) = &a.gamma_gen {
        if parse_q_list(g)?.iter().any(|q| *q != Q::from_integer(0)) {
            return Err(CliError::validation("dynamical packages are built over Γ = {0}; --gamma-gen must be 0"));
        }
    }
    let field = PrimeField::new(a.field_p).map_err(|e| CliError::validation(e.to_string()))?;
    let eps = a.eps.as_deref().map(parse_q_list).transpose()?;
    if let Some(e) = &eps {
        if e.is_empty() || e.iter().any(|q| *q <= Q::from_integer(0)) {
            return Err(CliError::validation("ε grid must be nonempty and positive"));
        }
    }
    let coupling = parse_coupling(a.coupling.as_deref(), &model)?;
    let tolerance = Tolerance { relative: a.rel_tol, absolute: a.abs_tol, inequality: a.ineq_tol };
    let seed = a.common.seed;
    let config = ExperimentConfig {
        model: model.describe(),
        k_min: a.k_min,
        k_max: a.k_max,
        curve_k_max: a.curve_k_max.unwrap_or(a.k_max),
        eps: eps.as_ref().map(|e| e.iter().map(fq).collect()),
        field_p: a.field_p,
        coupling: format!("{coupling:?}"),
        tolerance: tolerance.clone(),
        seed,
        max_boxes: a.max_boxes,
        max_segments: a.max_segments,
        svg: a.svg,
    };
    let hash = crate::io::config_hash(&config);
    let mut warnings = Vec::new();

    let search = SearchConfig { max_boxes: a.max_boxes, ..SearchConfig::default() };
    let tables: Vec<OrbitTable> = (a.k_min..=a.k_max)
        .map(|k| match &model {
            Model::Twist(m) => find_periodic_orbits(m, k, &search),
            Model::Horseshoe(s) => horseshoe_orbit_table(&SymbolicHorseshoe::new(*s), k),
        })
        .collect();
    let mut budget_hit = false;
    for t in &tables {
        if t.partial {
            budget_hit = true;
            warnings.push(format!("k = {}: orbit search stopped at the box budget; p(k) is a lower bound", t.period));
        }
        if t.degenerate {
            warnings.push(format!("k = {}: periodic points form a continuum; no isolated orbits listed", t.period));
        }
        if t.excluded_parabolic > 0 {
            warnings.push(format!("k = {}: {} parabolic orbits excluded", t.period, t.excluded_parabolic));
        }
    }
    let mut out = OutputDir::create(&a.common.out)?;
    let mut bars = Vec::new();
    for t in &tables {
        let b = build_package_from_orbits(t, &coupling, field).map_err(|e| CliError::validation(e.to_string()))?;
        let v = b.package.validate();
        if !v.is_valid() {
            return Err(CliError::validation(format!("k = {}: {}", t.period, v.violations.join("; "))));
        }
        if b.dropped_arrows > 0 {
            warnings.push(format!("k = {}: {} gradient arrows dropped", t.period, b.dropped_arrows));
        }
        if !a.skip_packages {
            out.write(&format!("package_k{}.txt", t.period), &format!("# config {hash} seed {seed}\n{}", b.package.to_text()))?;
        }
        bars.push((t.period, barcode(&b.package).map_err(|e| CliError::validation(e.to_string()))?));
    }
    let gap = action_gap_scan(&tables, false, 0.0);
    let grid = match &eps {
        Some(e) => e.clone(),
        None => {
            // gap floors below the grid bottom carry no information about the bar lengths
            let top = gap.floor.filter(|f| *f >= 1e-2).unwrap_or(1.0).min(1.0);
            log_eps_grid(top, 1e-3, 8)
        }
    };
    let zero = Q::from_integer(0);
    let be = barcode_entropy_from_barcodes(&bars, &grid, &zero, Window::TrailingHalf).map_err(|e| CliError::validation(e.to_string()))?;
    let orbit = orbit_entropy(&tables, false, Window::TrailingHalf).ok();
    let hyperbolic = orbit_entropy(&tables, true, Window::TrailingHalf).ok();
    let (volume, lengths) = match &model {
        Model::Twist(m) => {
            let cfg = CurveConfig { max_segments: a.max_segments, ..CurveConfig::default() };
            let g = curve_volume_growth(m, &Polyline::zero_section(), config.curve_k_max, &cfg);
            if g.partial {
                budget_hit = true;
                warnings.push(format!("curve refinement stopped at the segment budget after k = {}", g.lengths.len().saturating_sub(1)));
            }
            (volume_entropy(&g, Window::TrailingHalf).ok(), g.lengths.iter().map(|(k, l, _)| (*k, *l)).collect())
        }
        Model::Horseshoe(_) => (None, Vec::new()),
    };
    let smallest = be.rows.last().expect("certified row").counts.clone();
    let subsampling = GrowthSequence::from_counts(SeriesKind::Bars, smallest)
        .map(|s| subsampling_ratios(&s, &[2, 3]))
        .unwrap_or_default();
    let gamma = gamma_lower_bound(&bars, &zero);
    let verdicts = compare_theorems(
        &TheoremInputs {
            barcode: Some(be.value),
            volume: volume.as_ref().map(|f| f.rate()),
            orbit: orbit.as_ref().map(|f| f.rate()),
            hyperbolic: hyperbolic.as_ref().map(|f| f.rate()),
        },
        &tolerance,
    );
    let report = EntropyReport {
        label: model.describe(),
        barcode: Some(be),
        orbit,
        hyperbolic,
        volume,
        point_counts: tables.iter().map(|t| (t.period, t.point_count())).collect(),
        lengths,
        gamma: Some(gamma),
        verdicts,
        subsampling,
        warnings: warnings.clone(),
    };

    let mut search_csv = String::from("k,evaluations,newton_runs,newton_failures,levels,partial,excluded_parabolic\n");
    for t in &tables {
        out.write_csv(&format!("orbits_k{}.csv", t.period), &hash, seed, &t.to_csv())?;
        let st = &t.stats;
        let _ = writeln!(
            search_csv,
            "{},{},{},{},{},{},{}",
            t.period, st.evaluations, st.newton_runs, st.newton_failures, st.levels, t.partial, t.excluded_parabolic
        );
    }
    out.write_csv("search.csv", &hash, seed, &search_csv)?;
    for (k, b) in &bars {
        out.write_csv(&format!("barcode_k{k}.csv"), &hash, seed, &b.to_csv())?;
    }
    let mut gap_csv = String::from("k,min_gap\n");
    for (k, g) in &gap.per_k {
        let _ = writeln!(gap_csv, "{k},{}", g.map_or("inf".to_string(), |v| format!("{v:.12}")));
    }
    out.write_csv("action_gap.csv", &hash, seed, &gap_csv)?;
    out.write_csv("report.csv", &hash, seed, &report.to_csv())?;
    #[derive(Serialize)]
    struct Stamped<'a> {
        config_hash: &'a str,
        seed: u64,
        report: &'a EntropyReport,
    }
    let json = serde_json::to_string_pretty(&Stamped { config_hash: &hash, seed, report: &report }).expect("serializes");
    out.write("report.json", &(json + "\n"))?;
    if a.svg {
        out.write("report.svg", &report.to_svg())?;
    }
    out.finish("entropy", seed, &config, &warnings)?;
    for (name, v) in report.verdicts.all() {
        eprintln!("{name}: {v:?}");
    }
    Ok(Outcome { code: if budget_hit { EXIT_BUDGET } else { 0 }, messages: warnings })
}
