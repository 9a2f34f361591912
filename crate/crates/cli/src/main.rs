mod cmd_barcode;
mod cmd_crofton;
mod cmd_entropy;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "floer", version, about = "Barcodes, barcode entropy and Crofton checks for filtered Floer-type complexes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
pub struct Common {
    /// Output directory (created if missing).
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Barcode, b_ε table and validation report of a package file.
    Barcode(cmd_barcode::BarcodeArgs),
    /// Orbit tables, packages, barcodes and the entropy report for a model.
    Entropy(cmd_entropy::EntropyArgs),
    /// Monte-Carlo intersection ratio of a tomograph family against curves.
    Crofton(cmd_crofton::CroftonArgs),
}

fn init_workers() -> Result<(), io::CliError> {
    if let Ok(v) = std::env::var("FLOER_WORKERS") {
        let n: usize = v.parse().map_err(|_| io::CliError::validation(format!("FLOER_WORKERS must be a positive integer, got `{v}`")))?;
        if n == 0 {
            return Err(io::CliError::validation("FLOER_WORKERS must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| io::CliError::validation(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = init_workers().and_then(|_| match cli.command {
        Command::Barcode(a) => cmd_barcode::run(&a),
        Command::Entropy(a) => cmd_entropy::run(&a),
        Command::Crofton(a) => cmd_crofton::run(&a),
    });
    match result {
        Ok(warnings) => {
            for w in &warnings.messages {
                eprintln!("warning: {w}");
            }
            ExitCode::from(warnings.code as u8)
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code as u8)
        }
    }
}

/// Successful run: exit code 0, or the budget code when results are partial.
pub struct Outcome {
    pub code: i32,
    pub messages: Vec<String>,
}

impl Outcome {
    pub fn ok() -> Self {
        Self { code: 0, messages: Vec::new() }
    }
}

/// Comma-separated exact rationals (integers, n/d, decimals).
pub fn parse_q_list(s: &str) -> Result<Vec<floer_core::Q>, io::CliError> {
    s.split(',')
        .map(|t| t.trim())
        .filter(|t| !t.is_empty())
        .map(|t| floer_core::rational::parse(t).ok_or_else(|| io::CliError::parse(format!("bad number `{t}`"))))
        .collect()
}
