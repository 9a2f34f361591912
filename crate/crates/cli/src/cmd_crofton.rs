use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;
use floer_dynamics::crofton::{crofton_check, curve_suite, CroftonError, TomographSpec};
use floer_dynamics::curves::Polyline;
use serde::Serialize;

use crate::io::{read, CliError, OutputDir};
use crate::{Common, Outcome};

#[derive(Args)]
pub struct CroftonArgs {
    /// Tomograph spec file (`translate R`, `radius r`, `basis cos j` lines).
    #[arg(long)]
    pub tomograph: PathBuf,
    /// Curve file with one `x y` point per line; the built-in ten-curve suite when omitted.
    #[arg(long)]
    pub curve: Option<PathBuf>,
    #[arg(long, default_value_t = 20000)]
    pub samples: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Serialize)]
struct Config {
    tomograph: String,
    curve_sha256: Option<String>,
    samples: usize,
    seed: u64,
}

#[derive(Serialize)]
struct Row {
    curve: String,
    length: f64,
    mean_crossings: f64,
    integral: f64,
    ratio: f64,
    resampled: usize,
}

#[derive(Serialize)]
struct Summary {
    constant: f64,
    max_ratio: f64,
    bounded: bool,
    rows: Vec<Row>,
    config_hash: String,
    seed: u64,
}

fn crofton_error(e: CroftonError) -> CliError {
    match e {
        CroftonError::Parse { .. } => CliError::parse(e.to_string()),
        other => CliError::validation(other.to_string()),
    }
}

pub fn run(a: &CroftonArgs) -> Result<Outcome, CliError> {
    let spec = TomographSpec::from_text(&read(&a.tomograph)?).map_err(crofton_error)?;
    spec.validate(1024).map_err(crofton_error)?;
    if a.samples == 0 {
        return Err(crofton_error(CroftonError::NoSamples));
    }
    let (curves, curve_sha) = match &a.curve {
        Some(path) => {
            let text = read(path)?;
            let c = Polyline::from_text(&text).map_err(CliError::parse)?;
            (vec![(path.display().to_string(), c)], Some(crate::io::sha256_hex(text.as_bytes())))
        }
        None => (curve_suite(), None),
    };
    let seed = a.common.seed;
    let config = Config { tomograph: spec.to_text(), curve_sha256: curve_sha, samples: a.samples, seed };
    let hash = crate::io::config_hash(&config);
    let mut rows = Vec::new();
    let mut hist = String::from("curve,crossings,count\n");
    let mut csv = String::from("curve,length,mean_crossings,integral,ratio,constant,resampled\n");
    for (name, c) in &curves {
        let r = crofton_check(&spec, c, a.samples, seed).map_err(crofton_error)?;
        for (n, count) in r.histogram.iter().enumerate() {
            if *count > 0 {
                let _ = writeln!(hist, "{name},{n},{count}");
            }
        }
        let _ = writeln!(
            csv,
            "{name},{:.9},{:.9},{:.9},{:.9},{:.9},{}",
            r.length, r.mean_crossings, r.integral, r.ratio, r.constant, r.resampled
        );
        rows.push(Row {
            curve: name.clone(),
            length: r.length,
            mean_crossings: r.mean_crossings,
            integral: r.integral,
            ratio: r.ratio,
            resampled: r.resampled,
        });
    }
    let constant = spec.constant();
    let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let bounded = max_ratio <= 1.1 * constant;
    let summary = Summary { constant, max_ratio, bounded, rows, config_hash: hash.clone(), seed };
    let mut out = OutputDir::create(&a.common.out)?;
    out.write_csv("crofton.csv", &hash, seed, &csv)?;
    out.write_csv("histogram.csv", &hash, seed, &hist)?;
    out.write("crofton.json", &(serde_json::to_string_pretty(&summary).expect("serializes") + "\n"))?;
    out.finish("crofton", seed, &config, &[])?;
    Ok(Outcome::ok())
}
