mod common;

use std::f64::consts::E;

use common::*;
use weightlab::space::{generate, GeneratorKind, GeneratorSpec};
use weightlab::theorems::*;
use weightlab::weights::*;
use weightlab::{MetricKind, Space};

fn two_point() -> Space {
    Space::from_coordinates(vec![vec![0.0], vec![1.0]], MetricKind::Euclidean, vec![0.5, 0.5]).unwrap()
}

fn grid(n: usize) -> Space {
    let spec = GeneratorSpec::new(GeneratorKind::Grid {
        shape: vec![n],
        metric: MetricKind::Euclidean,
    });
    generate(&spec, 0).unwrap()
}

#[test]
fn two_point_bounds() {
    let space = two_point();
    let w = [1.0, E];
    let logs = [0.0, 1.0];
    let a1 = a1_constant(&space, &w).unwrap().value;
    let ainf = ainf_constant(&space, &w).unwrap().value;
    let c = rhinf_constant(&space, &w).unwrap().value;
    let blo = blo_norm(&space, &logs).unwrap().value;
    let buo = buo_norm(&space, &logs).unwrap().value;

    assert_close(a1, (1.0 + E) / 2.0, 1e-15);
    assert_close(c, 2.0 * E / (1.0 + E), 1e-15);
    assert_close(blo, 0.5, 1e-15);
    assert_close(buo, 0.5, 1e-15);
    // Upper bounds are attained.
    assert_close(a1, ainf * blo.exp(), 1e-9);
    assert_close(buo.exp(), c * ainf, 1e-9);
    // Lower bounds are strict here: 1.64872 < 1.85914 and 1.46212 < 1.64872.
    assert!(blo.exp() < a1 - 0.2);
    assert!(c < buo.exp() - 0.18);

    let tol = Tolerances::default();
    let a = check_a1_characterization(&space, &w, &tol).unwrap();
    let r = check_rhinf_characterization(&space, &w, &tol).unwrap();
    for report in [&a, &r] {
        assert!(report.passed());
        assert!(report.margin.abs() <= 1e-9, "{report:?}");
    }
}

#[test]
fn two_point_individual_checks() {
    let space = two_point();
    let w = [1.0, E];
    let tol = Tolerances::default();
    let [max, min] = check_commutation(&space, &w, &tol).unwrap();
    assert!(max.passed() && min.passed());
    let [a1, ap] = check_harnack(&space, &w, 2.0, &tol).unwrap();
    assert!(a1.passed() && ap.passed());
    assert_close(a1.lhs, E, 1e-12);
    let [ap, osc] = check_duality(&space, &w, 2.0, &tol).unwrap();
    assert!(ap.passed() && osc.passed());
    assert_close(ap.lhs, 1.27154, 1e-5);
    let m = check_multiplier(&space, &w, &w, &tol).unwrap();
    assert!(m.passed());
    let [blo, buo] = check_oscillation_characterization(&space, &[0.0, 1.0], &tol).unwrap();
    assert!(blo.passed() && buo.passed());
    assert_close(blo.lhs, 0.5, 1e-15);
}

#[test]
fn constant_weight_passes_everything() {
    for n in [1, 2, 5, 17] {
        let space = grid(n);
        let w = vec![3.5; n];
        let report = run_suite(&space, &w, None, &SuiteParams::default());
        assert!(report.passed, "{:?}", report.failures().collect::<Vec<_>>());
        for r in report.reports.iter().filter(|r| r.id.starts_with("ratio.")) {
            assert!(r.margin.is_nan(), "{r:?}");
        }
    }
}

#[test]
fn suite_on_worked_example_and_self_test() {
    let space = two_point();
    let w = [1.0, E];
    let report = run_suite(&space, &w, None, &SuiteParams::default());
    assert!(report.passed);
    let params = SuiteParams {
        self_test: true,
        ..SuiteParams::default()
    };
    let report = run_suite(&space, &w, None, &params);
    assert!(!report.passed);
    let failed: Vec<&str> = report.failures().map(|r| r.id.as_str()).collect();
    assert_eq!(failed, ["selftest.inverted"]);
}

#[test]
fn batches_are_deterministic() {
    let params = SuiteParams::default();
    let once = run_batch(&random_batch(9, 12, 24), &params);
    let twice = run_batch(&random_batch(9, 12, 24), &params);
    let text = |s: &[SuiteReport]| to_jsonl(s.iter().flat_map(|r| &r.reports));
    assert_eq!(text(&once), text(&twice));
    assert!(once.iter().all(|s| s.passed));
}

#[test]
fn hard_checks_hold_on_random_instances() {
    let params = SuiteParams::default();
    for (space, w) in instances(17, 30, 40) {
        let tol = &params.tolerances;
        let f: Vec<f64> = w.iter().map(|v| v.ln()).collect();
        let mut reports = Vec::new();
        reports.extend(check_commutation(&space, &w, tol).unwrap());
        reports.extend(check_oscillation_characterization(&space, &f, tol).unwrap());
        reports.extend(check_harnack(&space, &w, 3.0, tol).unwrap());
        reports.push(check_a1_characterization(&space, &w, tol).unwrap());
        reports.push(check_rhinf_characterization(&space, &w, tol).unwrap());
        reports.extend(check_converse_chain(&space, &w, tol).unwrap());
        reports.extend(check_power_props(&space, &w, 1.5, 2.0, tol).unwrap());
        reports.extend(check_duality(&space, &w, 1.5, tol).unwrap());
        for r in reports {
            assert!(r.passed(), "{r:?}");
        }
        assert!(!self_test_inverted(&space, &w, tol).unwrap().passed());
    }
}

#[test]
fn unquantified_ratio_table() {
    println!("{:>5} {:>28} {:>12}", "n", "id", "ratio");
    for n in [16, 64, 256] {
        let space = grid(n);
        let w = generate_weight(&space, WeightFamily::PowerLaw, 1);
        let reports = report_unquantified(&space, &w, 2.0, &Tolerances::default()).unwrap();
        for r in &reports {
            println!("{n:>5} {:>28} {:>12.6}", r.id, r.margin);
            if r.is_hard() {
                assert!(r.passed(), "{r:?}");
            } else {
                assert!(r.margin.is_finite() && r.margin > 0.0);
            }
        }
    }
}
