#![allow(dead_code)]

use weightlab::theorems::random_batch;
use weightlab::weights::generate_weight;
use weightlab::Space;

/// Seeded `(space, weight)` pairs drawn from the batch generator.
pub fn instances(seed: u64, count: usize, max_n: usize) -> Vec<(Space, Vec<f64>)> {
    random_batch(seed, count, max_n)
        .into_iter()
        .map(|inst| {
            let space = inst.space().unwrap();
            let w = generate_weight(&space, inst.weight, inst.weight_seed);
            (space, w)
        })
        .collect()
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

#[track_caller]
pub fn assert_close(a: f64, b: f64, tol: f64) {
    assert!(rel_close(a, b, tol), "{a} vs {b} (tol {tol})");
}

/// Members of the open ball `{y : d(c, y) < r}`.
pub fn open_ball(space: &Space, c: usize, r: f64) -> Vec<usize> {
    (0..space.len()).filter(|&y| space.dist(c, y) < r).collect()
}

pub fn mass(space: &Space, members: &[usize]) -> f64 {
    members.iter().map(|&i| space.measure()[i]).sum()
}

pub fn average(space: &Space, members: &[usize], f: &[f64]) -> f64 {
    let num: f64 = members.iter().map(|&i| space.measure()[i] * f[i]).sum();
    num / mass(space, members)
}

/// Every distinct open ball, found by brute force: for each center, the
/// open ball just above each distance.
pub fn all_balls(space: &Space) -> Vec<Vec<usize>> {
    let n = space.len();
    let mut out = Vec::new();
    for c in 0..n {
        let mut ds: Vec<f64> = (0..n).map(|y| space.dist(c, y)).collect();
        ds.sort_by(f64::total_cmp);
        ds.dedup();
        for &d in &ds {
            let members: Vec<usize> = (0..n).filter(|&y| space.dist(c, y) <= d).collect();
            out.push(members);
        }
    }
    out.sort();
    out.dedup();
    out
}
