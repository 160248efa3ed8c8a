use std::path::PathBuf;

use clap::Args;
use weightlab::theorems::{
    random_batch, run_batch, run_suite, summary_csv, to_jsonl, SuiteParams, SuiteReport, Tolerances,
};

use crate::{load_document, pick_weight, write_output, CliError, CliResult, Exponents};

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Space document to check
    #[arg(long, conflicts_with = "random")]
    input: Option<PathBuf>,
    /// Weight to check (default: every weight in the document)
    #[arg(long)]
    weight: Option<String>,
    /// Second weight for the multiplier check (default: the weight itself)
    #[arg(long)]
    phi: Option<String>,
    #[command(flatten)]
    exponents: Exponents,
    /// Run a seeded random batch instead of a document
    #[arg(long, requires = "seed")]
    random: bool,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 200)]
    count: usize,
    #[arg(long, default_value_t = 64)]
    max_n: usize,
    /// Relative inequality tolerance
    #[arg(long, env = "WEIGHTLAB_TOLERANCE", default_value_t = 1e-9)]
    tolerance: f64,
    /// Relative equality tolerance (relaxed to the inequality tolerance for
    /// weights with dynamic range above 1e6)
    #[arg(long, default_value_t = 1e-12)]
    eq_tolerance: f64,
    /// Append a deliberately inverted check; the run must then fail
    #[arg(long)]
    self_test: bool,
    /// JSON-lines reports; printed to stdout if omitted
    #[arg(long)]
    output: Option<PathBuf>,
    /// CSV summary of the reports
    #[arg(long)]
    csv: Option<PathBuf>,
}

pub fn run(args: VerifyArgs) -> CliResult {
    for (name, v) in [("tolerance", args.tolerance), ("eq-tolerance", args.eq_tolerance)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(CliError::input(format!("--{name} must be positive, got {v}")));
        }
    }
    let mut params = SuiteParams {
        tolerances: Tolerances {
            inequality: args.tolerance,
            equality: args.eq_tolerance,
            relaxed_equality: args.tolerance.max(args.eq_tolerance),
            ..Tolerances::default()
        },
        self_test: args.self_test,
        ..SuiteParams::default()
    };

    let (labels, suites): (Vec<String>, Vec<SuiteReport>) = if args.random {
        let seed = args.seed.expect("clap enforces --seed");
        if args.max_n == 0 {
            return Err(CliError::input("--max-n must be at least 1"));
        }
        let batch = random_batch(seed, args.count, args.max_n);
        let suites = run_batch(&batch, &params);
        (batch.iter().map(|i| format!("instance {}", i.index)).collect(), suites)
    } else {
        let input = args
            .input
            .as_ref()
            .ok_or_else(|| CliError::input("give --input <document> or --random --seed S"))?;
        args.exponents.validate()?;
        params.p = args.exponents.p;
        params.s = args.exponents.s;
        let (space, weights) = load_document(input)?;
        let names: Vec<String> = match &args.weight {
            Some(name) => vec![name.clone()],
            None => weights.keys().cloned().collect(),
        };
        if names.is_empty() {
            return Err(CliError::input(format!("{} contains no weights", input.display())));
        }
        let phi = args.phi.as_deref().map(|n| pick_weight(&weights, n)).transpose()?;
        let mut suites = Vec::new();
        for name in &names {
            let w = pick_weight(&weights, name)?;
            if let Some(i) = w.iter().position(|v| !(v.is_finite() && *v > 0.0)) {
                return Err(CliError::input(format!(
                    "weight `{name}` must be strictly positive; entry {i} is {}",
                    w[i]
                )));
            }
            suites.push(run_suite(&space, w, phi, &params));
        }
        (names.iter().map(|n| format!("weight `{n}`")).collect(), suites)
    };

    let reports: Vec<_> = suites.iter().flat_map(|s| &s.reports).collect();
    write_output(args.output.as_deref(), &to_jsonl(reports.iter().copied()))?;
    if let Some(path) = &args.csv {
        write_output(Some(path), &summary_csv(reports.iter().copied()))?;
    }

    let hard = reports.iter().filter(|r| r.is_hard()).count();
    let failed: Vec<_> = reports.iter().filter(|r| !r.passed()).collect();
    for (label, suite) in labels.iter().zip(&suites) {
        for warning in &suite.context.warnings {
            eprintln!("warning ({label}): {warning}");
        }
    }
    for r in &failed {
        let at = r.instance.map(|i| format!(" [instance {i}]")).unwrap_or_default();
        let note = r.note.as_deref().map(|n| format!(" ({n})")).unwrap_or_default();
        eprintln!("FAIL {}{at}: lhs = {}, rhs = {}, margin = {}{note}", r.id, r.lhs, r.rhs, r.margin);
    }
    eprintln!(
        "{} suite(s), {hard} hard checks, {} failed, {} soft reports",
        suites.len(),
        failed.len(),
        reports.len() - hard
    );
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::failed(format!("{} hard check(s) failed", failed.len())))
    }
}
