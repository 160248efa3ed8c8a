use std::path::PathBuf;

use clap::Args;
use serde::Serialize;
use weightlab::factorization::{refined_jones, verify_factorization, FactorOptions, FactorPair};
use weightlab::theorems::{CheckReport, Tolerances};

use crate::{load_document, pick_weight, write_output, CliError, CliResult, Exponents};

#[derive(Args, Debug)]
pub struct FactorArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    weight: String,
    #[command(flatten)]
    exponents: Exponents,
    /// Seed of the random restarts
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 8)]
    multistarts: usize,
    #[arg(long, default_value_t = 100)]
    max_sweeps: usize,
    #[arg(long, env = "WEIGHTLAB_TOLERANCE", default_value_t = 1e-9)]
    tolerance: f64,
    /// JSON output; printed to stdout if omitted
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Serialize)]
struct FactorOutput<'a> {
    weight: &'a str,
    pair: &'a FactorPair,
    verification: &'a [CheckReport],
    passed: bool,
}

pub fn run(args: FactorArgs) -> CliResult {
    args.exponents.validate()?;
    if !(args.tolerance.is_finite() && args.tolerance > 0.0) {
        return Err(CliError::input(format!("--tolerance must be positive, got {}", args.tolerance)));
    }
    if args.multistarts == 0 {
        return Err(CliError::input("--multistarts must be at least 1"));
    }
    let (space, weights) = load_document(&args.input)?;
    let w = pick_weight(&weights, &args.weight)?;
    let options = FactorOptions {
        multistarts: args.multistarts,
        max_sweeps: args.max_sweeps,
        seed: args.seed,
        ..FactorOptions::default()
    };
    let Exponents { p, s } = args.exponents;
    let pair = refined_jones(&space, w, p, s, &options)?;
    let tolerances = Tolerances {
        inequality: args.tolerance,
        ..Tolerances::default()
    };
    let verification = verify_factorization(&space, w, &pair, &tolerances)?;
    let passed = verification.iter().all(CheckReport::passed);

    let output = FactorOutput {
        weight: &args.weight,
        pair: &pair,
        verification: &verification,
        passed,
    };
    let mut json = serde_json::to_string_pretty(&output).map_err(|e| CliError::input(e.to_string()))?;
    json.push('\n');
    write_output(args.output.as_deref(), &json)?;
    if passed {
        Ok(())
    } else {
        let failed: Vec<&str> = verification.iter().filter(|r| !r.passed()).map(|r| r.id.as_str()).collect();
        Err(CliError::failed(format!("factorization checks failed: {}", failed.join(", "))))
    }
}
