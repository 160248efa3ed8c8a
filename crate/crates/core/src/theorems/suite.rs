//! Runs every check on one `(space, weight)` pair, and seeded random batches.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::factorization::{refined_jones, verify_factorization, FactorOptions};
use crate::space::{
    annular_decay_constant, doubling_constant, generate, AnnularDecayQuery, DoublingResult,
    GeneratorKind, GeneratorSpec, MeasureLaw, MetricKind, Space,
};
use crate::weights::{dynamic_range, generate_weight, WeightFamily};

use super::checks::*;
use super::{inputs_digest, CheckReport, Tolerances};

/// Weights with a larger max/min ratio get a warning in the suite context.
const RANGE_WARNING: f64 = 1e12;
const EXPONENTS: [f64; 3] = [1.5, 2.0, 3.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuiteParams {
    pub p: f64,
    pub s: f64,
    pub tolerances: Tolerances,
    pub factor: FactorOptions,
    /// Append the always-failing `selftest.inverted` check.
    pub self_test: bool,
}

impl Default for SuiteParams {
    fn default() -> Self {
        SuiteParams {
            p: 2.0,
            s: 2.0,
            tolerances: Tolerances::default(),
            factor: FactorOptions::quick(0),
            self_test: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteContext {
    pub n: usize,
    pub diameter: f64,
    pub doubling: DoublingResult,
    /// `α = 1`, `r_min` = diameter; recorded for context, never a
    /// precondition.
    pub annular: Option<AnnularDecayQuery>,
    pub dynamic_range: f64,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub reports: Vec<CheckReport>,
    pub context: SuiteContext,
    /// True iff no hard check failed.
    pub passed: bool,
}

impl SuiteReport {
    pub fn failures(&self) -> impl Iterator<Item = &CheckReport> {
        self.reports.iter().filter(|r| !r.passed())
    }
}

fn push<const K: usize, E: std::fmt::Display>(
    out: &mut Vec<CheckReport>,
    ids: [&str; K],
    inputs: &str,
    result: Result<impl IntoIterator<Item = CheckReport>, E>,
) {
    match result {
        Ok(reports) => out.extend(reports),
        Err(e) => out.extend(ids.iter().map(|id| CheckReport::errored(id, inputs.to_string(), &e))),
    }
}

/// Runs every hard check and the soft reports on `w` (and `φ` for the
/// multiplier check; `w` itself when absent). Evaluation errors become failed
/// entries; the report order is fixed.
pub fn run_suite(space: &Space, w: &[f64], phi: Option<&[f64]>, params: &SuiteParams) -> SuiteReport {
    let tol = &params.tolerances;
    let (p, s) = (params.p, params.s);
    let inputs = inputs_digest(space, &[w], &[p, s]);
    let mut out = Vec::new();

    push(&mut out, ["commutation.max", "commutation.min"], &inputs, check_commutation(space, w, tol));
    let logs: Vec<f64> = w.iter().map(|v| v.ln()).collect();
    push(
        &mut out,
        ["oscillation.blo", "oscillation.buo"],
        &inputs,
        check_oscillation_characterization(space, &logs, tol),
    );
    push(&mut out, ["harnack.a1", "harnack.ap"], &inputs, check_harnack(space, w, p, tol));
    push(&mut out, ["theorem.a1"], &inputs, check_a1_characterization(space, w, tol).map(Some));
    push(&mut out, ["theorem.rhinf"], &inputs, check_rhinf_characterization(space, w, tol).map(Some));
    push(
        &mut out,
        ["converse.a", "converse.b", "converse.c"],
        &inputs,
        check_converse_chain(space, w, tol),
    );
    push(
        &mut out,
        ["power.a", "power.b", "power.c", "power.d"],
        &inputs,
        check_power_props(space, w, s, p, tol),
    );
    push(
        &mut out,
        ["multiplier"],
        &inputs,
        check_multiplier(space, phi.unwrap_or(w), w, tol).map(Some),
    );
    push(&mut out, ["duality.ap", "duality.oscillation"], &inputs, check_duality(space, w, p, tol));
    push(
        &mut out,
        ["identity.min_buo", "identity.max_blo"],
        &inputs,
        report_unquantified(space, w, s, tol),
    );
    push(
        &mut out,
        ["factor.reconstruction", "factor.w1", "factor.w2", "factor.w2_rhinf"],
        &inputs,
        refined_jones(space, w, p, s, &params.factor).and_then(|pair| verify_factorization(space, w, &pair, tol)),
    );
    if params.self_test {
        push(&mut out, ["selftest.inverted"], &inputs, self_test_inverted(space, w, tol).map(Some));
    }

    let passed = out.iter().all(CheckReport::passed);
    SuiteReport {
        reports: out,
        context: context(space, w),
        passed,
    }
}

fn context(space: &Space, w: &[f64]) -> SuiteContext {
    let diameter = space.diameter();
    let range = dynamic_range(w);
    let mut warnings = Vec::new();
    if range > RANGE_WARNING {
        warnings.push(format!(
            "weight dynamic range {range:e} exceeds {RANGE_WARNING:e}; margins near the tolerance are not meaningful"
        ));
    }
    let annular = if diameter > 0.0 {
        annular_decay_constant(space, 1.0, diameter).ok()
    } else {
        None
    };
    SuiteContext {
        n: space.len(),
        diameter,
        doubling: doubling_constant(space),
        annular,
        dynamic_range: range,
        warnings,
    }
}

/// One randomly drawn suite instance; everything is reproducible from the
/// fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchInstance {
    pub index: usize,
    pub generator: GeneratorSpec,
    pub space_seed: u64,
    pub weight: WeightFamily,
    pub weight_seed: u64,
    pub phi: WeightFamily,
    pub phi_seed: u64,
    pub p: f64,
    pub s: f64,
}

impl BatchInstance {
    pub fn space(&self) -> Result<Space, crate::SpaceError> {
        generate(&self.generator, self.space_seed)
    }
}

fn random_metric(rng: &mut ChaCha8Rng) -> MetricKind {
    *[MetricKind::Euclidean, MetricKind::L1, MetricKind::Linf]
        .choose(rng)
        .unwrap()
}

fn random_kind(rng: &mut ChaCha8Rng, n: usize, allow_snowflake: bool) -> GeneratorKind {
    let choices = if allow_snowflake { 6 } else { 5 };
    match rng.gen_range(0..choices) {
        0 => GeneratorKind::Grid {
            shape: vec![n],
            metric: MetricKind::Euclidean,
        },
        1 => {
            let a = ((n as f64).sqrt() as usize).max(1);
            GeneratorKind::Grid {
                shape: vec![a, (n / a).max(1)],
                metric: random_metric(rng),
            }
        }
        2 => GeneratorKind::Path { n },
        3 => GeneratorKind::Tree { n },
        4 => GeneratorKind::RandomPoints {
            n,
            dim: rng.gen_range(1..=3),
            metric: random_metric(rng),
        },
        _ => GeneratorKind::Snowflake {
            base: Box::new(random_kind(rng, n, false)),
            eps: *[0.3, 0.5, 0.75].choose(rng).unwrap(),
        },
    }
}

/// Draws `count` instances with at most `max_n` points. Instance `i` uses
/// stream `i` of a ChaCha8 generator seeded with `seed`, so a prefix of a
/// batch does not depend on `count`.
pub fn random_batch(seed: u64, count: usize, max_n: usize) -> Vec<BatchInstance> {
    let max_n = max_n.max(1);
    (0..count)
        .map(|index| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(index as u64);
            let n = rng.gen_range(max_n.min(2)..=max_n);
            let kind = random_kind(&mut rng, n, true);
            let measure = if rng.gen_bool(0.5) {
                MeasureLaw::Uniform
            } else {
                MeasureLaw::Random
            };
            BatchInstance {
                index,
                generator: GeneratorSpec { kind, measure },
                space_seed: rng.gen(),
                weight: *WeightFamily::RANDOM.choose(&mut rng).unwrap(),
                weight_seed: rng.gen(),
                phi: *WeightFamily::RANDOM.choose(&mut rng).unwrap(),
                phi_seed: rng.gen(),
                p: *EXPONENTS.choose(&mut rng).unwrap(),
                s: *EXPONENTS.choose(&mut rng).unwrap(),
            }
        })
        .collect()
}

/// Builds and runs one batch instance; `base` supplies tolerances, search
/// options and the self-test flag. Reports are tagged with the instance
/// index.
pub fn run_instance(instance: &BatchInstance, base: &SuiteParams) -> SuiteReport {
    let params = SuiteParams {
        p: instance.p,
        s: instance.s,
        factor: FactorOptions {
            seed: instance.weight_seed,
            ..base.factor
        },
        ..*base
    };
    let mut report = match instance.space() {
        Ok(space) => {
            let w = generate_weight(&space, instance.weight, instance.weight_seed);
            let phi = generate_weight(&space, instance.phi, instance.phi_seed);
            run_suite(&space, &w, Some(&phi), &params)
        }
        Err(e) => SuiteReport {
            reports: vec![CheckReport::errored("space", String::new(), e)],
            context: SuiteContext {
                n: 0,
                diameter: f64::NAN,
                doubling: DoublingResult {
                    value: f64::NAN,
                    center: 0,
                    radius_lo: f64::NAN,
                    radius_hi: f64::NAN,
                },
                annular: None,
                dynamic_range: f64::NAN,
                warnings: Vec::new(),
            },
            passed: false,
        },
    };
    for r in &mut report.reports {
        r.instance = Some(instance.index);
    }
    report
}

/// Runs a batch in parallel; results keep the batch order.
pub fn run_batch(instances: &[BatchInstance], base: &SuiteParams) -> Vec<SuiteReport> {
    instances.par_iter().map(|i| run_instance(i, base)).collect()
}

/// One JSON object per line.
pub fn to_jsonl<'a>(reports: impl IntoIterator<Item = &'a CheckReport>) -> String {
    let mut out = String::new();
    for r in reports {
        out.push_str(&serde_json::to_string(r).expect("reports serialize"));
        out.push('\n');
    }
    out
}

pub fn summary_csv<'a>(reports: impl IntoIterator<Item = &'a CheckReport>) -> String {
    let mut out = String::from("instance,id,relation,verdict,lhs,rhs,margin,tolerance\n");
    for r in reports {
        let instance = r.instance.map(|i| i.to_string()).unwrap_or_default();
        let relation = serde_json::to_value(r.relation).unwrap();
        writeln!(
            out,
            "{instance},{},{},{},{},{},{},{}",
            r.id,
            relation.as_str().unwrap(),
            r.verdict,
            r.lhs,
            r.rhs,
            r.margin,
            r.tolerance
        )
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use std::f64::consts::E;

    use super::*;
    use crate::theorems::Verdict;

    fn two_point() -> Space {
        Space::from_coordinates(vec![vec![0.0], vec![1.0]], MetricKind::Euclidean, vec![0.5, 0.5])
            .unwrap()
    }

    #[test]
    fn worked_example_passes() {
        let report = run_suite(&two_point(), &[1.0, E], None, &SuiteParams::default());
        for r in &report.reports {
            assert!(r.passed(), "{r:?}");
        }
        assert!(report.passed);
        assert_eq!(report.context.doubling.value, 2.0);
    }

    #[test]
    fn self_test_fails_the_suite() {
        let params = SuiteParams {
            self_test: true,
            ..SuiteParams::default()
        };
        let report = run_suite(&two_point(), &[1.0, 1.0], None, &params);
        assert!(!report.passed);
        let failed: Vec<_> = report.failures().map(|r| r.id.as_str()).collect();
        assert_eq!(failed, ["selftest.inverted"]);
    }

    #[test]
    fn errors_become_failed_entries() {
        let report = run_suite(&two_point(), &[1.0, 0.0], None, &SuiteParams::default());
        assert!(!report.passed);
        assert!(report.reports.iter().all(|r| r.verdict == Verdict::Fail || r.verdict == Verdict::Soft));
        assert!(report.reports.iter().any(|r| r.id == "factor.w2_rhinf"));
    }

    #[test]
    fn batch_is_deterministic_and_prefix_stable() {
        let a = random_batch(7, 6, 20);
        let b = random_batch(7, 3, 20);
        assert_eq!(&a[..3], &b[..]);
        let ra = run_batch(&a[..3], &SuiteParams::default());
        let rb = run_batch(&b, &SuiteParams::default());
        assert_eq!(to_jsonl(ra.iter().flat_map(|r| &r.reports)), to_jsonl(rb.iter().flat_map(|r| &r.reports)));
        assert!(ra.iter().all(|r| r.passed));
    }
}
