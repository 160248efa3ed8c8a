use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod analyze;
mod bench;
mod factor;
mod gen;
mod verify;

#[derive(Parser, Debug)]
#[command(name = "weightlab", version)]
#[command(about = "Weight constants, maximal functions and theorem checks on finite metric measure spaces")]
struct Cli {
    /// Worker threads (defaults to one per core)
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a space document with a few seeded weights
    Gen(gen::GenArgs),
    /// Compute every constant and norm of one weight
    Analyze(analyze::AnalyzeArgs),
    /// Run the theorem checks on a document or a random batch
    Verify(verify::VerifyArgs),
    /// Factor a weight as w1 * w2 and certify the factors
    Factor(factor::FactorArgs),
    /// Time the kernels after checking the fast path against the naive one
    Bench(bench::BenchArgs),
}

/// Exponent flags shared by several subcommands.
#[derive(Args, Debug, Clone, Copy)]
pub struct Exponents {
    /// Muckenhoupt exponent, > 1
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    /// Reverse Hölder exponent, > 1
    #[arg(long, default_value_t = 2.0)]
    pub s: f64,
}

impl Exponents {
    pub fn validate(&self) -> Result<(), CliError> {
        for (name, v) in [("p", self.p), ("s", self.s)] {
            if !(v.is_finite() && v > 1.0) {
                return Err(CliError::input(format!(
                    "--{name} {v} is outside the supported range (1, inf)"
                )));
            }
        }
        Ok(())
    }
}

/// Error carrying its exit code: 1 for failed checks, 2 for bad input.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }

    pub fn failed(message: impl Into<String>) -> Self {
        CliError {
            code: 1,
            message: message.into(),
        }
    }
}

impl<E: std::error::Error> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError::input(e.to_string())
    }
}

pub type CliResult = Result<(), CliError>;

pub fn write_output(path: Option<&Path>, text: &str) -> CliResult {
    match path {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn load_document(
    path: &PathBuf,
) -> Result<(weightlab::Space, std::collections::BTreeMap<String, Vec<f64>>), CliError> {
    weightlab::space::load(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

pub fn pick_weight<'a>(
    weights: &'a std::collections::BTreeMap<String, Vec<f64>>,
    name: &str,
) -> Result<&'a [f64], CliError> {
    weights.get(name).map(Vec::as_slice).ok_or_else(|| {
        let known: Vec<&str> = weights.keys().map(String::as_str).collect();
        CliError::input(format!(
            "weight `{name}` not found; the document has [{}]",
            known.join(", ")
        ))
    })
}

fn run(cli: Cli) -> CliResult {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(CliError::input("--jobs must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::input(e.to_string()))?;
    }
    match cli.command {
        Command::Gen(args) => gen::run(args),
        Command::Analyze(args) => analyze::run(args),
        Command::Verify(args) => verify::run(args),
        Command::Factor(args) => factor::run(args),
        Command::Bench(args) => bench::run(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
