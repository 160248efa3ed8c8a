//! Reference `O(n³)` evaluation of the maximal-type operators.
//!
//! Every ball average is summed directly over the members (in index order)
//! and every `(point, center, rank)` triple is visited. Used by the benchmark
//! to cross-check the sweep before timing it.

use crate::space::Space;

fn extremes(space: &Space, f: &[f64], maximize: bool) -> Vec<f64> {
    let n = space.len();
    let family = space.family();
    let measure = space.measure();
    let mut out = vec![if maximize { f64::NEG_INFINITY } else { f64::INFINITY }; n];
    let mut averages = Vec::new();
    for c in 0..n {
        averages.clear();
        for &radius in family.radii(c) {
            let (mut num, mut den) = (0.0, 0.0);
            for i in 0..n {
                if space.dist(c, i) <= radius {
                    num += measure[i] * f[i];
                    den += measure[i];
                }
            }
            averages.push((radius, num / den));
        }
        for (y, slot) in out.iter_mut().enumerate() {
            let d = space.dist(c, y);
            for &(radius, avg) in &averages {
                if d <= radius {
                    *slot = if maximize { slot.max(avg) } else { slot.min(avg) };
                }
            }
        }
    }
    out
}

pub fn natural_maximal(space: &Space, f: &[f64]) -> Vec<f64> {
    extremes(space, f, true)
}

pub fn natural_minimal(space: &Space, f: &[f64]) -> Vec<f64> {
    extremes(space, f, false)
}

pub fn maximal(space: &Space, f: &[f64]) -> Vec<f64> {
    let g: Vec<f64> = f.iter().map(|v| v.abs()).collect();
    extremes(space, &g, true)
}

pub fn minimal(space: &Space, f: &[f64]) -> Vec<f64> {
    let g: Vec<f64> = f.iter().map(|v| v.abs()).collect();
    extremes(space, &g, false)
}
