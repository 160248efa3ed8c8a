use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use weightlab::factorization::FactorOptions;
use weightlab::operators::{self, naive};
use weightlab::space::{generate, GeneratorKind, GeneratorSpec};
use weightlab::theorems::{run_suite, SuiteParams};
use weightlab::weights::{generate_weight, WeightFamily};
use weightlab::{MetricKind, Space};

use crate::{write_output, CliError, CliResult};

/// Largest size for which the naive `O(n³)` operators are cross-checked.
const NAIVE_LIMIT: usize = 100;

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Comma-separated grid sizes; an empty list yields a header-only table
    #[arg(long, default_value = "250,500,1000")]
    sizes: String,
    /// Timings are the minimum over this many runs
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV output; printed to stdout if omitted
    #[arg(long)]
    output: Option<PathBuf>,
}

fn parse_sizes(text: &str) -> Result<Vec<usize>, CliError> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| match s.parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(CliError::input(format!("invalid size `{s}` in --sizes"))),
        })
        .collect()
}

fn grid(n: usize) -> Space {
    let spec = GeneratorSpec::new(GeneratorKind::Grid {
        shape: vec![n],
        metric: MetricKind::Euclidean,
    });
    generate(&spec, 0).expect("1-D grids are valid")
}

fn time<T>(repeats: usize, mut f: impl FnMut() -> T) -> f64 {
    (0..repeats.max(1))
        .map(|_| {
            let start = Instant::now();
            std::hint::black_box(f());
            start.elapsed().as_secs_f64()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Fails unless the fast operators match the naive ones within `1e-12`
/// relative.
fn cross_check(space: &Space, f: &[f64]) -> CliResult {
    type Fast = fn(&Space, &[f64]) -> operators::OperatorOutput;
    type Slow = fn(&Space, &[f64]) -> Vec<f64>;
    let pairs: [(&str, Fast, Slow); 4] = [
        ("M", operators::maximal, naive::maximal),
        ("m", operators::minimal, naive::minimal),
        ("natural M", operators::natural_maximal, naive::natural_maximal),
        ("natural m", operators::natural_minimal, naive::natural_minimal),
    ];
    for (name, fast, slow) in pairs {
        let a = fast(space, f).values;
        let b = slow(space, f);
        for (x, (u, v)) in a.iter().zip(&b).enumerate() {
            if (u - v).abs() > 1e-12 * u.abs().max(v.abs()).max(1.0) {
                return Err(CliError::failed(format!(
                    "{name} differs from the naive evaluation at point {x} (n = {}): {u} vs {v}",
                    space.len()
                )));
            }
        }
    }
    Ok(())
}

pub fn run(args: BenchArgs) -> CliResult {
    let sizes = parse_sizes(&args.sizes)?;
    let mut csv = String::from("n,kernel,seconds\n");
    for &n in &sizes {
        let space = grid(n);
        let w = generate_weight(&space, WeightFamily::PowerLaw, args.seed);
        let signed: Vec<f64> = w.iter().map(|v| v.ln()).collect();
        if n <= NAIVE_LIMIT {
            cross_check(&space, &w)?;
            cross_check(&space, &signed)?;
        }
        let t = time(args.repeats, || grid(n));
        writeln!(csv, "{n},balls,{t}").unwrap();
        let t = time(args.repeats, || operators::maximal(&space, &w));
        writeln!(csv, "{n},maximal,{t}").unwrap();
        let params = SuiteParams {
            factor: FactorOptions {
                multistarts: 1,
                max_sweeps: 0,
                ..FactorOptions::quick(args.seed)
            },
            ..SuiteParams::default()
        };
        let t = time(args.repeats, || run_suite(&space, &w, None, &params));
        writeln!(csv, "{n},suite,{t}").unwrap();
    }
    write_output(args.output.as_deref(), &csv)
}
