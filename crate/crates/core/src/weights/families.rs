//! Seeded weight laws for randomized verification.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::space::Space;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightFamily {
    Constant(f64),
    /// `(d(a, x) + h)^γ` around a random anchor `a`, `γ ∈ [-0.8, 1.5]`.
    PowerLaw,
    /// `exp(Σ_j a_j log(d(c_j, x) + h))`: exponential of a sum of logarithmic
    /// singularities, the model BMO function.
    ExpBmo,
    /// `log w` i.i.d. uniform on `[-L, L]`, `L ∈ [0.1, 2]`.
    UniformLog,
}

impl WeightFamily {
    pub const RANDOM: [WeightFamily; 3] = [
        WeightFamily::PowerLaw,
        WeightFamily::ExpBmo,
        WeightFamily::UniformLog,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            WeightFamily::Constant(_) => "constant",
            WeightFamily::PowerLaw => "power-law",
            WeightFamily::ExpBmo => "exp-bmo",
            WeightFamily::UniformLog => "uniform-log",
        }
    }
}

/// Draws a strictly positive weight on `space`; pure in `(space, family, seed)`.
pub fn generate_weight(space: &Space, family: WeightFamily, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = space.len();
    // Offset keeping the logarithmic singularities finite at their anchor.
    let h = 0.5 * if n > 1 { space.separation() } else { 1.0 };
    match family {
        WeightFamily::Constant(c) => vec![c; n],
        WeightFamily::PowerLaw => {
            let anchor = rng.gen_range(0..n);
            let gamma = rng.gen_range(-0.8..1.5);
            (0..n).map(|x| (space.dist(anchor, x) + h).powf(gamma)).collect()
        }
        WeightFamily::ExpBmo => {
            let terms: Vec<(usize, f64)> = (0..3)
                .map(|_| (rng.gen_range(0..n), rng.gen_range(-0.7..0.7)))
                .collect();
            (0..n)
                .map(|x| {
                    terms
                        .iter()
                        .map(|&(c, a)| a * (space.dist(c, x) + h).ln())
                        .sum::<f64>()
                        .exp()
                })
                .collect()
        }
        WeightFamily::UniformLog => {
            let spread: f64 = rng.gen_range(0.1..2.0);
            (0..n).map(|_| rng.gen_range(-spread..spread).exp()).collect()
        }
    }
}
