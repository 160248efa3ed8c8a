//! Seeded generators for the space families used by the verification suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{MetricKind, Space};
use crate::error::SpaceError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasureLaw {
    /// Every point has mass `1/n`.
    #[default]
    Uniform,
    /// Masses drawn from `[0.5, 1.5]`, normalised to total mass 1.
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GeneratorKind {
    /// Integer lattice points `0..shape[0] × 0..shape[1] × …`.
    Grid { shape: Vec<usize>, metric: MetricKind },
    /// Points on a line with gaps drawn from `[0.5, 1.5]`.
    Path { n: usize },
    /// Random recursive tree with edge lengths in `[0.5, 1.5]` and its
    /// shortest-path metric.
    Tree { n: usize },
    /// Uniform points in the unit cube.
    RandomPoints { n: usize, dim: usize, metric: MetricKind },
    /// `d ↦ d^eps` applied to a generated base space.
    Snowflake { base: Box<GeneratorKind>, eps: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    #[serde(flatten)]
    pub kind: GeneratorKind,
    #[serde(default)]
    pub measure: MeasureLaw,
}

impl GeneratorSpec {
    pub fn new(kind: GeneratorKind) -> Self {
        GeneratorSpec {
            kind,
            measure: MeasureLaw::Uniform,
        }
    }
}

/// Builds a space from `spec`; the result is a pure function of `(spec, seed)`.
pub fn generate(spec: &GeneratorSpec, seed: u64) -> Result<Space, SpaceError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    build(&spec.kind, spec.measure, &mut rng)
}

fn build(kind: &GeneratorKind, law: MeasureLaw, rng: &mut ChaCha8Rng) -> Result<Space, SpaceError> {
    match kind {
        GeneratorKind::Grid { shape, metric } => {
            if shape.is_empty() || shape.contains(&0) {
                return Err(invalid(format!("grid shape {shape:?} must be non-empty and positive")));
            }
            let n: usize = shape.iter().product();
            let mut coords = Vec::with_capacity(n);
            for mut idx in 0..n {
                let mut point = Vec::with_capacity(shape.len());
                for &side in shape {
                    point.push((idx % side) as f64);
                    idx /= side;
                }
                coords.push(point);
            }
            let measure = draw_measure(n, law, rng);
            Space::from_coordinates(coords, *metric, measure)
        }
        GeneratorKind::Path { n } => {
            require_points(*n)?;
            let mut x = 0.0;
            let coords = (0..*n)
                .map(|i| {
                    if i > 0 {
                        x += rng.gen_range(0.5..1.5);
                    }
                    vec![x]
                })
                .collect();
            let measure = draw_measure(*n, law, rng);
            Space::from_coordinates(coords, MetricKind::Euclidean, measure)
        }
        GeneratorKind::Tree { n } => {
            require_points(*n)?;
            let edges: Vec<_> = (1..*n)
                .map(|i| (rng.gen_range(0..i), i, rng.gen_range(0.5..1.5)))
                .collect();
            let measure = draw_measure(*n, law, rng);
            Space::from_graph(*n, &edges, measure)
        }
        GeneratorKind::RandomPoints { n, dim, metric } => {
            require_points(*n)?;
            if *dim == 0 {
                return Err(invalid("random points need dim ≥ 1".into()));
            }
            let coords = (0..*n)
                .map(|_| (0..*dim).map(|_| rng.gen::<f64>()).collect())
                .collect();
            let measure = draw_measure(*n, law, rng);
            Space::from_coordinates(coords, *metric, measure)
        }
        GeneratorKind::Snowflake { base, eps } => {
            let base = build(base, law, rng)?;
            snowflake(&base, *eps)
        }
    }
}

/// The snowflake transform `d ↦ d^eps`, a metric for `0 < eps ≤ 1`.
pub fn snowflake(base: &Space, eps: f64) -> Result<Space, SpaceError> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(invalid(format!("snowflake exponent {eps} must lie in (0, 1]")));
    }
    let dist = base.distances().iter().map(|d| d.powf(eps)).collect();
    let space = Space::from_trusted(
        base.len(),
        dist,
        base.measure().to_vec(),
        MetricKind::Explicit,
        None,
    )?;
    Ok(space.with_labels(base.labels().to_vec()))
}

fn draw_measure(n: usize, law: MeasureLaw, rng: &mut ChaCha8Rng) -> Vec<f64> {
    match law {
        MeasureLaw::Uniform => vec![1.0 / n as f64; n],
        MeasureLaw::Random => {
            let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..1.5)).collect();
            let total: f64 = raw.iter().sum();
            raw.into_iter().map(|m| m / total).collect()
        }
    }
}

fn require_points(n: usize) -> Result<(), SpaceError> {
    if n == 0 {
        Err(invalid("at least one point is required".into()))
    } else {
        Ok(())
    }
}

fn invalid(msg: String) -> SpaceError {
    SpaceError::InvalidParams(msg)
}
