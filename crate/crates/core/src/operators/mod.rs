//! Maximal and minimal functions.
//!
//! A ball `(c, k)` contains `y` exactly when `rank_of(c, y) ≤ k`, so the balls
//! of `c` containing `y` form a suffix of `c`'s rank list. One pass of prefix
//! sums gives every ball average of `c`, a suffix extremum over those averages
//! answers all points at once, and a final scatter over `y` finishes the
//! center. The whole sweep costs `O(n²)` on top of the `O(n² log n)` index.

pub mod naive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::space::{BallId, Space};

/// Ball averages laid out like the [`crate::BallFamily`] rank arrays.
#[derive(Debug, Clone, PartialEq)]
pub struct BallAverages {
    offsets: Vec<usize>,
    values: Vec<f64>,
}

impl BallAverages {
    pub fn center(&self, center: usize) -> &[f64] {
        &self.values[self.offsets[center]..self.offsets[center + 1]]
    }

    pub fn get(&self, id: BallId) -> f64 {
        self.center(id.center)[id.rank - 1]
    }

    pub fn iter(&self) -> impl Iterator<Item = (BallId, f64)> + '_ {
        (0..self.offsets.len() - 1).flat_map(move |center| {
            self.center(center)
                .iter()
                .enumerate()
                .map(move |(k, &v)| (BallId { center, rank: k + 1 }, v))
        })
    }
}

/// `Σ μ_i f_i / Σ μ_i` over every ball, summed in ascending distance rank.
pub fn ball_averages(space: &Space, f: &[f64]) -> BallAverages {
    assert_eq!(f.len(), space.len(), "function length must match the space");
    let family = space.family();
    let mut offsets = vec![0];
    let mut values = Vec::with_capacity(family.ball_count());
    let mut sums = Vec::new();
    for c in 0..space.len() {
        family.rank_sums(c, space.measure(), f, &mut sums);
        values.extend(sums.iter().zip(family.masses(c)).map(|(s, m)| s / m));
        offsets.push(values.len());
    }
    BallAverages { offsets, values }
}

/// Pointwise values of a maximal-type operator and the ball attaining each.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorOutput {
    pub values: Vec<f64>,
    pub witness: Vec<BallId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Extremum {
    Max,
    Min,
}

#[derive(Clone, Copy)]
struct Candidate {
    value: f64,
    rank: u32,
    center: u32,
}

impl Candidate {
    /// Strict preference: better value, then smaller rank, then smaller center.
    #[inline]
    fn beats(&self, other: &Candidate, ext: Extremum) -> bool {
        let better = match ext {
            Extremum::Max => self.value > other.value,
            Extremum::Min => self.value < other.value,
        };
        better
            || (self.value == other.value
                && (self.rank, self.center) < (other.rank, other.center))
    }
}

fn sweep(space: &Space, f: &[f64], ext: Extremum) -> OperatorOutput {
    let n = space.len();
    assert_eq!(f.len(), n, "function length must match the space");
    let family = space.family();
    let measure = space.measure();
    let chunk = n.div_ceil(rayon::current_num_threads() * 4).max(16);

    let init = Candidate {
        value: match ext {
            Extremum::Max => f64::NEG_INFINITY,
            Extremum::Min => f64::INFINITY,
        },
        rank: u32::MAX,
        center: u32::MAX,
    };

    let merge = |mut a: Vec<Candidate>, b: Vec<Candidate>| {
        for (x, y) in a.iter_mut().zip(b) {
            if y.beats(x, ext) {
                *x = y;
            }
        }
        a
    };

    let best = (0..n)
        .collect::<Vec<_>>()
        .par_chunks(chunk)
        .map(|centers| {
            let mut best = vec![init; n];
            let mut sums = Vec::new();
            let mut suffix: Vec<(f64, u32)> = Vec::new();
            for &c in centers {
                family.rank_sums(c, measure, f, &mut sums);
                let masses = family.masses(c);
                suffix.clear();
                suffix.resize(sums.len(), (0.0, 0));
                let mut cur = (init.value, u32::MAX);
                for k in (0..sums.len()).rev() {
                    // The singleton average is f itself; m·f/m can be off by an ulp.
                    let avg = if k == 0 { f[c] } else { sums[k] / masses[k] };
                    // `>=`/`<=` so that ties move to the smaller rank.
                    let take = match ext {
                        Extremum::Max => avg >= cur.0,
                        Extremum::Min => avg <= cur.0,
                    };
                    if take {
                        cur = (avg, k as u32);
                    }
                    suffix[k] = cur;
                }
                let ranks = family.rank_row(c);
                for (slot, &r) in best.iter_mut().zip(ranks) {
                    let (value, rank) = suffix[r as usize];
                    let cand = Candidate {
                        value,
                        rank,
                        center: c as u32,
                    };
                    if cand.beats(slot, ext) {
                        *slot = cand;
                    }
                }
            }
            best
        })
        .reduce(|| vec![init; n], merge);

    OperatorOutput {
        values: best.iter().map(|b| b.value).collect(),
        witness: best
            .iter()
            .map(|b| BallId {
                center: b.center as usize,
                rank: b.rank as usize + 1,
            })
            .collect(),
    }
}

/// Natural maximal function `M♮f(x) = max_{B ∋ x} avg_B f`.
pub fn natural_maximal(space: &Space, f: &[f64]) -> OperatorOutput {
    sweep(space, f, Extremum::Max)
}

/// Natural minimal function `m♮f(x) = min_{B ∋ x} avg_B f`.
pub fn natural_minimal(space: &Space, f: &[f64]) -> OperatorOutput {
    sweep(space, f, Extremum::Min)
}

/// Hardy–Littlewood maximal function `Mf = M♮|f|`.
pub fn maximal(space: &Space, f: &[f64]) -> OperatorOutput {
    natural_maximal(space, &abs(f))
}

/// Minimal function `mf = m♮|f|`.
pub fn minimal(space: &Space, f: &[f64]) -> OperatorOutput {
    natural_minimal(space, &abs(f))
}

fn abs(f: &[f64]) -> Vec<f64> {
    f.iter().map(|v| v.abs()).collect()
}

#[cfg(test)]
mod tests {
    use std::f64::consts::E;

    use super::*;
    use crate::space::MetricKind;

    fn two_point() -> Space {
        Space::from_matrix(vec![vec![0.0, 1.0], vec![1.0, 0.0]], vec![0.5, 0.5]).unwrap()
    }

    fn path3() -> Space {
        Space::from_coordinates(
            vec![vec![0.0], vec![1.0], vec![2.0]],
            MetricKind::Euclidean,
            vec![1.0 / 3.0; 3],
        )
        .unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn averages_of_constants() {
        let s = path3();
        let avg = ball_averages(&s, &[-2.5; 3]);
        assert!(avg.iter().all(|(_, v)| (v + 2.5).abs() < 1e-15));
    }

    #[test]
    fn worked_averages() {
        let avg = ball_averages(&two_point(), &[1.0, E]);
        assert!((avg.get(BallId { center: 0, rank: 2 }) - 1.85914).abs() < 1e-5);
        let avg = ball_averages(&path3(), &[0.0, 3.0, 0.0]);
        assert!((avg.get(BallId { center: 1, rank: 2 }) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn two_point_operators() {
        let s = two_point();
        let f = [1.0, E];
        assert!(close(&maximal(&s, &f).values, &[1.85914, E], 1e-5));
        assert!(close(&minimal(&s, &f).values, &[1.0, 1.85914], 1e-5));
        assert_eq!(natural_maximal(&s, &[0.0, 1.0]).values, vec![0.5, 1.0]);
        assert_eq!(natural_minimal(&s, &[0.0, 1.0]).values, vec![0.0, 0.5]);
    }

    #[test]
    fn path_operators() {
        let s = path3();
        let f = [0.0, 3.0, 0.0];
        assert!(close(&maximal(&s, &f).values, &[1.5, 3.0, 1.5], 1e-15));
        assert_eq!(minimal(&s, &f).values[0], 0.0);
        let g = [-3.0, 0.0, 0.0];
        assert!((natural_maximal(&s, &g).values[0] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn constants_are_fixed_points() {
        let s = path3();
        for c in [-1.25, 0.0, 4.0] {
            let f = [c; 3];
            assert!(close(&natural_maximal(&s, &f).values, &f, 1e-15));
            assert!(close(&natural_minimal(&s, &f).values, &f, 1e-15));
            assert!(close(&maximal(&s, &f).values, &[c.abs(); 3], 1e-15));
        }
    }

    #[test]
    fn witnesses_prefer_small_rank_then_center() {
        // Constant function: every ball ties, the singleton at the point wins
        // unless a smaller center shares rank 1, which is impossible, so the witness
        // is the point itself.
        let s = path3();
        let out = natural_maximal(&s, &[1.0; 3]);
        for (y, w) in out.witness.iter().enumerate() {
            assert_eq!(*w, BallId { center: y, rank: 1 });
        }
    }
}
