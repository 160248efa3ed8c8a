use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;
use serde::Serialize;
use weightlab::space::{annular_decay_constant, count_balls, doubling_constant, AnnularDecayQuery, DoublingResult};
use weightlab::weights::{
    a1_constant, ainf_constant, ap_constant, blo_norm, bmo_norm, buo_norm, rhinf_constant, rhs_constant,
    FunctionalResult,
};
use weightlab::BallId;

use crate::{load_document, pick_weight, write_output, CliError, CliResult, Exponents};

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    #[arg(long)]
    input: PathBuf,
    /// Name of the weight in the document
    #[arg(long)]
    weight: String,
    #[command(flatten)]
    exponents: Exponents,
    /// Annular decay exponent in [0, 1]
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Smallest radius for annular decay (default: the diameter)
    #[arg(long)]
    r_min: Option<f64>,
    /// Count balls by distinct member set
    #[arg(long)]
    dedupe_balls: bool,
    /// JSON report; printed to stdout if omitted
    #[arg(long)]
    output: Option<PathBuf>,
    /// CSV table of the constants
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Serialize)]
struct Row {
    quantity: String,
    value: f64,
    witness: BallId,
    #[serde(skip_serializing_if = "Option::is_none")]
    point: Option<usize>,
}

impl Row {
    fn new(quantity: impl Into<String>, r: FunctionalResult) -> Self {
        Row {
            quantity: quantity.into(),
            value: r.value,
            witness: r.witness,
            point: r.point,
        }
    }
}

#[derive(Serialize)]
struct Analysis {
    weight: String,
    n: usize,
    p: f64,
    s: f64,
    balls: usize,
    dedupe_balls: bool,
    constants: Vec<Row>,
    doubling: DoublingResult,
    annular: AnnularDecayQuery,
}

pub fn run(args: AnalyzeArgs) -> CliResult {
    args.exponents.validate()?;
    let (space, weights) = load_document(&args.input)?;
    let w = pick_weight(&weights, &args.weight)?;
    let Exponents { p, s } = args.exponents;
    let logs: Vec<f64> = w.iter().map(|v| v.ln()).collect();
    if let Some(i) = w.iter().position(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(CliError::input(format!(
            "weight `{}` must be strictly positive; entry {i} is {}",
            args.weight, w[i]
        )));
    }

    let ap = ap_constant(&space, w, p)?;
    let rhs = rhs_constant(&space, w, s)?;
    let constants = vec![
        Row::new(ap.kind.label(), ap),
        Row::new("A_1", a1_constant(&space, w)?),
        Row::new("A_inf", ainf_constant(&space, w)?),
        Row::new(rhs.kind.label(), rhs),
        Row::new("RH_inf", rhinf_constant(&space, w)?),
        Row::new("BMO(log w)", bmo_norm(&space, &logs)?),
        Row::new("BLO(log w)", blo_norm(&space, &logs)?),
        Row::new("BUO(log w)", buo_norm(&space, &logs)?),
    ];
    let diameter = space.diameter();
    let r_min = args.r_min.unwrap_or(if diameter > 0.0 { diameter } else { 1.0 });
    let annular = annular_decay_constant(&space, args.alpha, r_min)?;

    let analysis = Analysis {
        weight: args.weight,
        n: space.len(),
        p,
        s,
        balls: count_balls(&space, args.dedupe_balls),
        dedupe_balls: args.dedupe_balls,
        constants,
        doubling: doubling_constant(&space),
        annular,
    };

    if let Some(path) = &args.csv {
        let mut csv = String::from("quantity,value,center,rank,point\n");
        for r in &analysis.constants {
            let point = r.point.map(|x| x.to_string()).unwrap_or_default();
            writeln!(csv, "{},{},{},{},{point}", r.quantity, r.value, r.witness.center, r.witness.rank).unwrap();
        }
        writeln!(
            csv,
            "doubling,{},{},,",
            analysis.doubling.value, analysis.doubling.center
        )
        .unwrap();
        let center = analysis
            .annular
            .witness
            .map(|w| w.center.to_string())
            .unwrap_or_default();
        writeln!(csv, "annular,{},{center},,", analysis.annular.constant).unwrap();
        write_output(Some(path), &csv)?;
    }
    let mut json = serde_json::to_string_pretty(&analysis).map_err(|e| CliError::input(e.to_string()))?;
    json.push('\n');
    write_output(args.output.as_deref(), &json)
}
