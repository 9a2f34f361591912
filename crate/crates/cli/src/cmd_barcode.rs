use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;
use floer_core::barcode::barcode;
use floer_core::rational::format as fq;
use floer_core::{ComplexError, FloerPackage, PeriodGroup};
use serde::Serialize;

use crate::io::{read, CliError, OutputDir};
use crate::{parse_q_list, Common, Outcome};

#[derive(Args)]
pub struct BarcodeArgs {
    /// Package file.
    pub package: PathBuf,
    /// Comma-separated ε values for the b_ε table.
    #[arg(long, default_value = "")]
    pub eps: String,
    /// Required field characteristic; a package over another field is rejected.
    #[arg(long = "field-p")]
    pub field_p: Option<u32>,
    /// Period group generators replacing those of the file (comma-separated).
    #[arg(long = "gamma-gen")]
    pub gamma_gen: Option<String>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Serialize)]
struct Config {
    package_sha256: String,
    eps: Vec<String>,
    field_p: Option<u32>,
    gamma_gen: Option<Vec<String>>,
    seed: u64,
}

fn parse_error(e: ComplexError) -> CliError {
    match e {
        ComplexError::Parse { .. } => CliError::parse(e.to_string()),
        other => CliError::validation(other.to_string()),
    }
}

pub fn run(a: &BarcodeArgs) -> Result<Outcome, CliError> {
    let text = read(&a.package)?;
    let mut p = FloerPackage::from_text(&text).map_err(parse_error)?;
    let eps = parse_q_list(&a.eps)?;
    if let Some(q) = eps.iter().find(|e| **e < floer_core::Q::from_integer(0)) {
        return Err(CliError::validation(format!("ε must be nonnegative, got {}", fq(q))));
    }
    if let Some(fp) = a.field_p {
        if fp != p.field().p() {
            return Err(CliError::validation(format!("package is over F_{}, --field-p asks for F_{fp}", p.field().p())));
        }
    }
    let gamma = a.gamma_gen.as_deref().map(parse_q_list).transpose()?;
    if let Some(g) = &gamma {
        let group = PeriodGroup::new(g.clone()).map_err(|e| CliError::validation(e.to_string()))?;
        p = FloerPackage::new(p.field(), group, p.generators().to_vec(), p.entries().map(|(i, j, s)| (i, j, s.clone())))
            .map_err(|e| CliError::validation(e.to_string()))?;
    }
    let report = p.validate();
    if !report.is_valid() {
        return Err(CliError::validation(format!("invalid package: {}", report.violations.join("; "))));
    }
    let bars = barcode(&p).map_err(|e| CliError::validation(e.to_string()))?;
    let config = Config {
        package_sha256: crate::io::sha256_hex(text.as_bytes()),
        eps: eps.iter().map(fq).collect(),
        field_p: a.field_p,
        gamma_gen: gamma.as_ref().map(|g| g.iter().map(fq).collect()),
        seed: a.common.seed,
    };
    let hash = crate::io::config_hash(&config);
    let seed = a.common.seed;
    let mut out = OutputDir::create(&a.common.out)?;
    out.write_csv("barcode.csv", &hash, seed, &bars.to_csv())?;
    let mut table = String::from("eps,b_eps\n");
    for e in &eps {
        let _ = writeln!(table, "{},{}", fq(e), bars.b_eps(e));
    }
    out.write_csv("b_eps.csv", &hash, seed, &table)?;
    let margin = match &report.margin {
        floer_core::Valuation::Finite(m) => fq(m),
        floer_core::Valuation::Infinite => "inf".into(),
    };
    let validation = format!(
        "# config {hash} seed {seed}\nvalid true\nd_squared_zero {}\naction_decreasing {}\nclasses_preserved {}\nexponents_in_gamma {}\nmargin {margin}\nboundary_depth {}\n",
        report.d_squared_zero,
        report.action_decreasing,
        report.classes_preserved,
        report.exponents_in_gamma,
        fq(&bars.boundary_depth())
    );
    out.write("validation.txt", &validation)?;
    out.finish("barcode", seed, &config, &[])?;
    Ok(Outcome::ok())
}
