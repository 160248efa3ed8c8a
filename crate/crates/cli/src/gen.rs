use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use weightlab::space::{doubling_constant, generate, snowflake, to_json, GeneratorKind, GeneratorSpec, MeasureLaw};
use weightlab::weights::{generate_weight, WeightFamily};
use weightlab::MetricKind;

use crate::{load_document, write_output, CliError, CliResult};

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Grid,
    Path,
    Tree,
    RandomPoints,
    Snowflake,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Euclidean,
    L1,
    Linf,
}

impl From<Metric> for MetricKind {
    fn from(m: Metric) -> Self {
        match m {
            Metric::Euclidean => MetricKind::Euclidean,
            Metric::L1 => MetricKind::L1,
            Metric::Linf => MetricKind::Linf,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    Uniform,
    Random,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    /// Number of points (for grids: total, a perfect `--dim`-th power)
    #[arg(long)]
    n: Option<usize>,
    /// Grid or point-cloud dimension
    #[arg(long, default_value_t = 1)]
    dim: usize,
    #[arg(long, value_enum, default_value_t = Metric::Euclidean)]
    metric: Metric,
    #[arg(long, value_enum, default_value_t = Measure::Uniform)]
    measure: Measure,
    /// Snowflake exponent in (0, 1]
    #[arg(long)]
    eps: Option<f64>,
    /// Base document for `--kind snowflake`; its weights are kept
    #[arg(long)]
    base: Option<PathBuf>,
    /// Required by every randomized generator
    #[arg(long)]
    seed: Option<u64>,
    /// Output document; printed to stdout if omitted
    #[arg(long)]
    output: Option<PathBuf>,
}

fn require_n(args: &GenArgs) -> Result<usize, CliError> {
    match args.n {
        Some(n) if n > 0 => Ok(n),
        _ => Err(CliError::input(format!("--kind {:?} needs --n ≥ 1", args.kind))),
    }
}

fn grid_shape(n: usize, dim: usize) -> Result<Vec<usize>, CliError> {
    if dim == 0 {
        return Err(CliError::input("--dim must be at least 1"));
    }
    let side = (n as f64).powf(1.0 / dim as f64).round() as usize;
    if side.checked_pow(dim as u32) != Some(n) {
        return Err(CliError::input(format!(
            "a {dim}-dimensional grid needs n to be a perfect {dim}-th power, got {n}"
        )));
    }
    Ok(vec![side; dim])
}

pub fn run(args: GenArgs) -> CliResult {
    let randomized = !matches!(args.kind, Kind::Grid | Kind::Snowflake) || args.measure == Measure::Random;
    let seed = match args.seed {
        Some(seed) => seed,
        None if randomized => {
            return Err(CliError::input(format!(
                "--seed is required for --kind {:?} with --measure {:?}",
                args.kind, args.measure
            )))
        }
        None => 0,
    };
    let measure = match args.measure {
        Measure::Uniform => MeasureLaw::Uniform,
        Measure::Random => MeasureLaw::Random,
    };

    let (space, mut weights) = if args.kind == Kind::Snowflake {
        let eps = args.eps.ok_or_else(|| CliError::input("--kind snowflake needs --eps"))?;
        let base = args
            .base
            .as_ref()
            .ok_or_else(|| CliError::input("--kind snowflake needs --base <document>"))?;
        let (base, weights) = load_document(base)?;
        (snowflake(&base, eps)?, weights)
    } else {
        let kind = match args.kind {
            Kind::Grid => GeneratorKind::Grid {
                shape: grid_shape(require_n(&args)?, args.dim)?,
                metric: args.metric.into(),
            },
            Kind::Path => GeneratorKind::Path { n: require_n(&args)? },
            Kind::Tree => GeneratorKind::Tree { n: require_n(&args)? },
            Kind::RandomPoints => GeneratorKind::RandomPoints {
                n: require_n(&args)?,
                dim: args.dim,
                metric: args.metric.into(),
            },
            Kind::Snowflake => unreachable!(),
        };
        let space = generate(&GeneratorSpec { kind, measure }, seed)?;
        (space, BTreeMap::new())
    };

    if weights.is_empty() {
        weights.insert("constant".to_string(), generate_weight(&space, WeightFamily::Constant(1.0), 0));
        for (i, family) in WeightFamily::RANDOM.into_iter().enumerate() {
            let w = generate_weight(&space, family, seed.wrapping_add(1 + i as u64));
            weights.insert(family.name().to_string(), w);
        }
    }

    write_output(args.output.as_deref(), &to_json(&space, &weights))?;
    let doubling = doubling_constant(&space);
    let summary = format!(
        "n = {}, diameter = {}, doubling constant = {}",
        space.len(),
        space.diameter(),
        doubling.value
    );
    if args.output.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(())
}
