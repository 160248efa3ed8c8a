//! Multistart coordinate descent for `min max([v₁]_1, [v₂]_1)` over `log v₂`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::WeightError;
use crate::space::Space;
use crate::weights::{a1_value, check_positive};

use super::FactorError;

/// Pairwise directions `e_i ± e_j` are only tried up to this many free
/// coordinates.
const PAIR_DIRECTION_LIMIT: usize = 12;
const SCAN_POINTS: usize = 9;
const INV_PHI: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FactorOptions {
    pub multistarts: usize,
    pub max_sweeps: usize,
    /// Golden-section steps per line search.
    pub line_iterations: usize,
    /// Stop once a full sweep improves the objective by less than this
    /// relative amount.
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for FactorOptions {
    fn default() -> Self {
        FactorOptions {
            multistarts: 8,
            max_sweeps: 100,
            line_iterations: 40,
            tolerance: 1e-6,
            seed: 0,
        }
    }
}

impl FactorOptions {
    /// A cheap setting for batch verification, where only the certificate
    /// bounds (which hold for any pair) are asserted.
    pub fn quick(seed: u64) -> Self {
        FactorOptions {
            multistarts: 2,
            max_sweeps: 1,
            line_iterations: 10,
            tolerance: 1e-6,
            seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchStatus {
    Converged,
    /// The sweep budget ran out before the improvement fell below tolerance;
    /// the best pair found is still returned.
    Stalled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JonesResult {
    pub v1: Vec<f64>,
    pub v2: Vec<f64>,
    pub a1_v1: f64,
    pub a1_v2: f64,
    pub objective: f64,
    /// Objective at `v₂ ≡ 1`.
    pub initial_objective: f64,
    pub status: SearchStatus,
    /// Index of the start that produced the result.
    pub start: usize,
    pub sweeps: usize,
}

/// Objective evaluator with reusable buffers.
struct Objective<'a> {
    space: &'a Space,
    log_u: Vec<f64>,
    q: f64,
    v1: Vec<f64>,
    v2: Vec<f64>,
    sums: Vec<f64>,
    mins: Vec<f64>,
}

impl<'a> Objective<'a> {
    fn new(space: &'a Space, u: &[f64], q: f64) -> Self {
        let n = space.len();
        Objective {
            space,
            log_u: u.iter().map(|v| v.ln()).collect(),
            q,
            v1: vec![0.0; n],
            v2: vec![0.0; n],
            sums: Vec::new(),
            mins: Vec::new(),
        }
    }

    fn parts(&mut self, t: &[f64]) -> (f64, f64) {
        for (i, &ti) in t.iter().enumerate() {
            self.v2[i] = ti.exp();
            self.v1[i] = (self.log_u[i] + (self.q - 1.0) * ti).exp();
        }
        let a = a1_value(self.space, &self.v1, &mut self.sums, &mut self.mins);
        let b = a1_value(self.space, &self.v2, &mut self.sums, &mut self.mins);
        (a, b)
    }

    fn eval(&mut self, t: &[f64]) -> f64 {
        let (a, b) = self.parts(t);
        a.max(b)
    }

    /// Minimizes along `t + α d` for `α ∈ [-h, h]`: a coarse scan followed by
    /// golden-section refinement around the best scan point. Moves `t` only
    /// on strict improvement and returns the new value.
    fn line_search(&mut self, t: &mut [f64], d: &[f64], h: f64, current: f64, iterations: usize) -> f64 {
        let mut probe = t.to_vec();
        let at = |obj: &mut Self, alpha: f64, probe: &mut Vec<f64>| {
            for ((p, &ti), &di) in probe.iter_mut().zip(t.iter()).zip(d) {
                *p = ti + alpha * di;
            }
            obj.eval(probe)
        };
        let step = 2.0 * h / (SCAN_POINTS - 1) as f64;
        let mut best = (current, 0.0);
        for k in 0..SCAN_POINTS {
            let alpha = -h + k as f64 * step;
            if alpha == 0.0 {
                continue;
            }
            let v = at(self, alpha, &mut probe);
            if v < best.0 {
                best = (v, alpha);
            }
        }
        let (mut lo, mut hi) = (best.1 - step, best.1 + step);
        let mut x1 = hi - INV_PHI * (hi - lo);
        let mut x2 = lo + INV_PHI * (hi - lo);
        let mut f1 = at(self, x1, &mut probe);
        let mut f2 = at(self, x2, &mut probe);
        for _ in 0..iterations {
            if f1 <= f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - INV_PHI * (hi - lo);
                f1 = at(self, x1, &mut probe);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + INV_PHI * (hi - lo);
                f2 = at(self, x2, &mut probe);
            }
        }
        for (v, alpha) in [(f1, x1), (f2, x2)] {
            if v < best.0 {
                best = (v, alpha);
            }
        }
        if best.0 < current {
            for (ti, &di) in t.iter_mut().zip(d) {
                *ti += best.1 * di;
            }
            best.0
        } else {
            current
        }
    }
}

struct Run {
    t: Vec<f64>,
    objective: f64,
    converged: bool,
    sweeps: usize,
}

fn descend(space: &Space, u: &[f64], q: f64, mut t: Vec<f64>, h: f64, options: &FactorOptions) -> Run {
    let n = t.len();
    let mut obj = Objective::new(space, u, q);
    // Scale invariance: (v₁, v₂) → (λ^{q−1}v₁, λv₂) keeps both constants.
    let pin = t[0];
    t.iter_mut().for_each(|v| *v -= pin);
    let mut value = obj.eval(&t);
    let free = n - 1;
    let mut extra: Vec<Vec<f64>> = Vec::new();
    if free > 1 {
        let mut ones = vec![1.0; n];
        ones[0] = 0.0;
        extra.push(ones);
        let mean = obj.log_u[1..].iter().sum::<f64>() / free as f64;
        let mut tilt: Vec<f64> = obj.log_u.iter().map(|v| mean - v).collect();
        tilt[0] = 0.0;
        let norm = tilt.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            tilt.iter_mut().for_each(|v| *v /= norm);
            extra.push(tilt);
        }
        if free <= PAIR_DIRECTION_LIMIT {
            for i in 1..n {
                for j in (i + 1)..n {
                    for sign in [1.0, -1.0] {
                        let mut d = vec![0.0; n];
                        d[i] = 1.0;
                        d[j] = sign;
                        extra.push(d);
                    }
                }
            }
        }
    }

    let mut sweeps = 0;
    let mut converged = free == 0;
    let mut unit = vec![0.0; n];
    while !converged && sweeps < options.max_sweeps {
        sweeps += 1;
        let before = value;
        for i in 1..n {
            unit[i] = 1.0;
            value = obj.line_search(&mut t, &unit, h, value, options.line_iterations);
            unit[i] = 0.0;
        }
        if before - value <= options.tolerance * before {
            // Coordinate moves are exhausted; try mixed directions before
            // declaring convergence.
            for d in &extra {
                value = obj.line_search(&mut t, d, h, value, options.line_iterations);
            }
            converged = before - value <= options.tolerance * before;
        }
    }
    Run {
        t,
        objective: value,
        converged,
        sweeps,
    }
}

/// Searches for `v₁, v₂ > 0` with `u = v₁ v₂^{1−q}` and small
/// `max([v₁]_1, [v₂]_1)`. `v₁` is defined as `u v₂^{q−1}`, so the returned
/// pair always factors `u`.
///
/// Starts, in order: `v₂ ≡ 1`, `v₂ = u^{-1/(q−1)}` (making `v₁` constant),
/// the geometric midpoint of the two, then seeded random points. The best
/// run is chosen by objective, then start index.
pub fn jones_factor(space: &Space, u: &[f64], q: f64, options: &FactorOptions) -> Result<JonesResult, FactorError> {
    let n = space.len();
    if u.len() != n {
        return Err(WeightError::LengthMismatch {
            expected: n,
            found: u.len(),
        }
        .into());
    }
    check_positive(u)?;
    if !(q.is_finite() && q > 1.0) {
        return Err(WeightError::InvalidExponent {
            name: "q",
            value: q,
            range: "(1, ∞)",
        }
        .into());
    }

    let log_u: Vec<f64> = u.iter().map(|v| v.ln()).collect();
    let (lo, hi) = log_u
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let h = (hi - lo).max(1.0);

    let flat: Vec<f64> = log_u.iter().map(|v| -v / (q - 1.0)).collect();
    let mut starts = vec![vec![0.0; n], flat.clone(), flat.iter().map(|v| 0.5 * v).collect()];
    let mut k = 0u64;
    while starts.len() < options.multistarts {
        let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
        rng.set_stream(k);
        k += 1;
        starts.push((0..n).map(|_| rng.gen_range(-h..h)).collect());
    }
    starts.truncate(options.multistarts.max(1));

    let runs: Vec<Run> = starts
        .into_par_iter()
        .map(|t0| descend(space, u, q, t0, h, options))
        .collect();
    let (start, best) = runs
        .into_iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.objective.total_cmp(&b.objective).then(i.cmp(j)))
        .expect("at least one start");

    let mut obj = Objective::new(space, u, q);
    let initial_objective = obj.eval(&vec![0.0; n]);
    let (a1_v1, a1_v2) = obj.parts(&best.t);
    Ok(JonesResult {
        v1: obj.v1.clone(),
        v2: obj.v2.clone(),
        a1_v1,
        a1_v2,
        objective: best.objective,
        initial_objective,
        status: if best.converged {
            SearchStatus::Converged
        } else {
            SearchStatus::Stalled
        },
        start,
        sweeps: best.sweeps,
    })
}
