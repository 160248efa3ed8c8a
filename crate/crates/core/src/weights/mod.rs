//! Characteristic constants of weights and oscillation norms.
//!
//! Every constant is a supremum over balls. Each center's balls are nested, so
//! the per-ball sums and extrema needed by a functional come out of one pass
//! along the center's distance order; the supremum is then a reduction over
//! centers with a fixed tie-break (larger value, smaller rank, smaller
//! center), independent of how the work is split across threads.

mod families;
mod fenwick;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use families::{generate_weight, WeightFamily};

use crate::error::WeightError;
use crate::operators;
use crate::space::{BallId, Space};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionalKind {
    Ap { p: f64 },
    A1,
    Ainf,
    RHs { s: f64 },
    RHinf,
    Bmo,
    Blo,
    Buo,
}

impl FunctionalKind {
    pub fn label(&self) -> String {
        match self {
            FunctionalKind::Ap { p } => format!("A_{p}"),
            FunctionalKind::A1 => "A_1".into(),
            FunctionalKind::Ainf => "A_inf".into(),
            FunctionalKind::RHs { s } => format!("RH_{s}"),
            FunctionalKind::RHinf => "RH_inf".into(),
            FunctionalKind::Bmo => "BMO".into(),
            FunctionalKind::Blo => "BLO".into(),
            FunctionalKind::Buo => "BUO".into(),
        }
    }
}

/// A computed constant together with the ball (and, for extremum-based
/// constants, the point) where the supremum is attained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionalResult {
    pub kind: FunctionalKind,
    pub value: f64,
    pub witness: BallId,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point: Option<usize>,
}

/// A nonnegative per-point function used as a weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WeightVector {
    values: Vec<f64>,
}

impl WeightVector {
    pub fn new(values: Vec<f64>) -> Result<Self, WeightError> {
        check_finite(&values)?;
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| **v < 0.0) {
            return Err(WeightError::NonpositiveWeight { index, value });
        }
        Ok(WeightVector { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.values.iter().all(|&v| v > 0.0)
    }

    /// `max w / min w`; infinite if some entry vanishes.
    pub fn dynamic_range(&self) -> f64 {
        dynamic_range(&self.values)
    }
}

pub fn dynamic_range(w: &[f64]) -> f64 {
    let (lo, hi) = w
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    hi / lo
}

#[derive(Debug, Clone, PartialEq)]
pub enum Transform {
    Power(f64),
    Inverse,
    Product(Vec<f64>),
    Log,
    Exp,
}

/// Pointwise transform. `Power`, `Inverse` and `Log` need strictly positive
/// input.
pub fn transform(w: &[f64], kind: &Transform) -> Result<Vec<f64>, WeightError> {
    check_finite(w)?;
    match kind {
        Transform::Power(s) => {
            check_positive(w)?;
            if *s == 1.0 {
                Ok(w.to_vec())
            } else {
                Ok(w.iter().map(|v| v.powf(*s)).collect())
            }
        }
        Transform::Inverse => {
            check_positive(w)?;
            Ok(w.iter().map(|v| 1.0 / v).collect())
        }
        Transform::Product(phi) => {
            if phi.len() != w.len() {
                return Err(WeightError::LengthMismatch {
                    expected: w.len(),
                    found: phi.len(),
                });
            }
            check_finite(phi)?;
            Ok(w.iter().zip(phi).map(|(a, b)| a * b).collect())
        }
        Transform::Log => {
            check_positive(w)?;
            Ok(w.iter().map(|v| v.ln()).collect())
        }
        Transform::Exp => Ok(w.iter().map(|v| v.exp()).collect()),
    }
}

pub(crate) fn check_finite(f: &[f64]) -> Result<(), WeightError> {
    match f.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        Some((index, &value)) => Err(WeightError::NonFinite { index, value }),
        None => Ok(()),
    }
}

pub(crate) fn check_positive(w: &[f64]) -> Result<(), WeightError> {
    check_finite(w)?;
    match w.iter().enumerate().find(|(_, v)| **v <= 0.0) {
        Some((index, &value)) => Err(WeightError::NonpositiveWeight { index, value }),
        None => Ok(()),
    }
}

fn check_len(space: &Space, f: &[f64]) -> Result<(), WeightError> {
    if f.len() != space.len() {
        return Err(WeightError::LengthMismatch {
            expected: space.len(),
            found: f.len(),
        });
    }
    Ok(())
}

fn check_weight(space: &Space, w: &[f64]) -> Result<(), WeightError> {
    check_len(space, w)?;
    check_positive(w)
}

fn check_function(space: &Space, f: &[f64]) -> Result<(), WeightError> {
    check_len(space, f)?;
    check_finite(f)
}

fn check_exponent(name: &'static str, value: f64) -> Result<(), WeightError> {
    if value.is_finite() && value > 1.0 {
        Ok(())
    } else {
        Err(WeightError::InvalidExponent {
            name,
            value,
            range: "(1, ∞)",
        })
    }
}

#[derive(Default)]
struct Scratch {
    a: Vec<f64>,
    b: Vec<f64>,
}

/// Maximum over all balls of the per-rank values produced by `eval`.
fn sup_over_balls<F>(space: &Space, eval: F) -> (f64, BallId)
where
    F: Fn(usize, &mut Scratch, &mut Vec<f64>) + Sync,
{
    let per_center: Vec<(f64, usize)> = (0..space.len())
        .into_par_iter()
        .map_init(
            || (Scratch::default(), Vec::new()),
            |(scratch, out), c| {
                eval(c, scratch, out);
                let mut best = (f64::NEG_INFINITY, 0);
                for (k, &v) in out.iter().enumerate() {
                    if v > best.0 {
                        best = (v, k);
                    }
                }
                best
            },
        )
        .collect();
    let mut best = (f64::NEG_INFINITY, BallId { center: 0, rank: 1 });
    for (center, (value, k)) in per_center.into_iter().enumerate() {
        let rank = k + 1;
        if value > best.0 || (value == best.0 && rank < best.1.rank) {
            best = (value, BallId { center, rank });
        }
    }
    best
}

/// Point of the ball with the extreme value of `f` (smallest index on ties).
fn extreme_point(space: &Space, ball: BallId, f: &[f64], maximize: bool) -> usize {
    let mut members: Vec<usize> = space.family().members(ball).iter().map(|&i| i as usize).collect();
    members.sort_unstable();
    let mut best = members[0];
    for &i in &members[1..] {
        if (maximize && f[i] > f[best]) || (!maximize && f[i] < f[best]) {
            best = i;
        }
    }
    best
}

/// `[w]_{A_p} = sup_B (avg_B w)(avg_B w^{-1/(p-1)})^{p-1}`.
pub fn ap_constant(space: &Space, w: &[f64], p: f64) -> Result<FunctionalResult, WeightError> {
    check_weight(space, w)?;
    check_exponent("p", p)?;
    let dual: Vec<f64> = w.iter().map(|v| v.powf(-1.0 / (p - 1.0))).collect();
    let family = space.family();
    let measure = space.measure();
    let (value, witness) = sup_over_balls(space, |c, s, out| {
        family.rank_sums(c, measure, w, &mut s.a);
        family.rank_sums(c, measure, &dual, &mut s.b);
        out.clear();
        out.extend(
            s.a.iter()
                .zip(&s.b)
                .zip(family.masses(c))
                .map(|((a, b), m)| (a / m) * (b / m).powf(p - 1.0)),
        );
    });
    Ok(FunctionalResult {
        kind: FunctionalKind::Ap { p },
        value,
        witness,
        point: None,
    })
}

/// `[w]_{A_1} = sup_B avg_B w / min_B w`.
pub fn a1_constant(space: &Space, w: &[f64]) -> Result<FunctionalResult, WeightError> {
    check_weight(space, w)?;
    let family = space.family();
    let measure = space.measure();
    let (value, witness) = sup_over_balls(space, |c, s, out| {
        family.rank_sums(c, measure, w, &mut s.a);
        family.rank_extremes(c, w, false, &mut s.b);
        out.clear();
        out.extend(
            s.a.iter()
                .zip(&s.b)
                .zip(family.masses(c))
                .map(|((a, lo), m)| (a / m) / lo),
        );
    });
    Ok(FunctionalResult {
        kind: FunctionalKind::A1,
        value,
        witness,
        point: Some(extreme_point(space, witness, w, false)),
    })
}

/// `[w]_{A_1}` without validation or witness, evaluated serially; for inner
/// loops. Equal to `a1_constant(space, w).value`.
pub(crate) fn a1_value(space: &Space, w: &[f64], sums: &mut Vec<f64>, mins: &mut Vec<f64>) -> f64 {
    let family = space.family();
    let measure = space.measure();
    let mut best = f64::NEG_INFINITY;
    for c in 0..space.len() {
        family.rank_sums(c, measure, w, sums);
        family.rank_extremes(c, w, false, mins);
        for ((a, lo), m) in sums.iter().zip(mins.iter()).zip(family.masses(c)) {
            best = best.max((a / m) / lo);
        }
    }
    best
}

/// `max_x Mw(x) / w(x)`, the pointwise form of the `A_1` constant.
pub fn a1_constant_maximal_form(space: &Space, w: &[f64]) -> Result<(f64, usize), WeightError> {
    check_weight(space, w)?;
    let mw = operators::maximal(space, w);
    Ok(argmax(mw.values.iter().zip(w).map(|(m, v)| m / v)))
}

/// `[w]_{A_∞} = sup_B avg_B w · exp(-avg_B log w)`.
pub fn ainf_constant(space: &Space, w: &[f64]) -> Result<FunctionalResult, WeightError> {
    check_weight(space, w)?;
    let logs: Vec<f64> = w.iter().map(|v| v.ln()).collect();
    let family = space.family();
    let measure = space.measure();
    let (value, witness) = sup_over_balls(space, |c, s, out| {
        family.rank_sums(c, measure, w, &mut s.a);
        family.rank_sums(c, measure, &logs, &mut s.b);
        out.clear();
        out.extend(
            s.a.iter()
                .zip(&s.b)
                .zip(family.masses(c))
                .map(|((a, l), m)| (a / m) * (-(l / m)).exp()),
        );
    });
    Ok(FunctionalResult {
        kind: FunctionalKind::Ainf,
        value,
        witness,
        point: None,
    })
}

/// `sup_B (avg_B w^s)^{1/s} / avg_B w`.
pub fn rhs_constant(space: &Space, w: &[f64], s: f64) -> Result<FunctionalResult, WeightError> {
    check_weight(space, w)?;
    check_exponent("s", s)?;
    let powered: Vec<f64> = w.iter().map(|v| v.powf(s)).collect();
    let family = space.family();
    let measure = space.measure();
    let (value, witness) = sup_over_balls(space, |c, sc, out| {
        family.rank_sums(c, measure, w, &mut sc.a);
        family.rank_sums(c, measure, &powered, &mut sc.b);
        out.clear();
        out.extend(
            sc.a.iter()
                .zip(&sc.b)
                .zip(family.masses(c))
                .map(|((a, b), m)| (b / m).powf(1.0 / s) / (a / m)),
        );
    });
    Ok(FunctionalResult {
        kind: FunctionalKind::RHs { s },
        value,
        witness,
        point: None,
    })
}

/// `sup_B max_B w / avg_B w`.
pub fn rhinf_constant(space: &Space, w: &[f64]) -> Result<FunctionalResult, WeightError> {
    check_weight(space, w)?;
    let family = space.family();
    let measure = space.measure();
    let (value, witness) = sup_over_balls(space, |c, s, out| {
        family.rank_sums(c, measure, w, &mut s.a);
        family.rank_extremes(c, w, true, &mut s.b);
        out.clear();
        out.extend(
            s.a.iter()
                .zip(&s.b)
                .zip(family.masses(c))
                .map(|((a, hi), m)| hi / (a / m)),
        );
    });
    Ok(FunctionalResult {
        kind: FunctionalKind::RHinf,
        value,
        witness,
        point: Some(extreme_point(space, witness, w, true)),
    })
}

/// `max_x w(x) / mw(x)`, the pointwise form of the `RH_∞` constant.
pub fn rhinf_constant_minimal_form(space: &Space, w: &[f64]) -> Result<(f64, usize), WeightError> {
    check_weight(space, w)?;
    let mw = operators::minimal(space, w);
    Ok(argmax(w.iter().zip(&mw.values).map(|(v, m)| v / m)))
}

/// `sup_B avg_B f - min_B f`.
pub fn blo_norm(space: &Space, f: &[f64]) -> Result<FunctionalResult, WeightError> {
    oscillation(space, f, FunctionalKind::Blo)
}

/// `sup_B max_B f - avg_B f`.
pub fn buo_norm(space: &Space, f: &[f64]) -> Result<FunctionalResult, WeightError> {
    oscillation(space, f, FunctionalKind::Buo)
}

fn oscillation(space: &Space, f: &[f64], kind: FunctionalKind) -> Result<FunctionalResult, WeightError> {
    check_function(space, f)?;
    let upper = kind == FunctionalKind::Buo;
    let g = shifted_to_zero(f);
    let family = space.family();
    let measure = space.measure();
    let (value, witness) = sup_over_balls(space, |c, s, out| {
        family.rank_sums(c, measure, &g, &mut s.a);
        family.rank_extremes(c, &g, upper, &mut s.b);
        out.clear();
        out.extend(s.a.iter().zip(&s.b).zip(family.masses(c)).map(|((a, e), m)| {
            let avg = a / m;
            if upper {
                e - avg
            } else {
                avg - e
            }
        }));
    });
    Ok(FunctionalResult {
        kind,
        value,
        witness,
        point: Some(extreme_point(space, witness, f, upper)),
    })
}

/// `f - min f`. The oscillation norms are shift invariant, and a constant
/// becomes exactly zero, so its norms are exactly zero.
fn shifted_to_zero(f: &[f64]) -> Vec<f64> {
    let low = f.iter().copied().fold(f64::INFINITY, f64::min);
    f.iter().map(|v| v - low).collect()
}

/// `sup_B avg_B |f - f_B|`.
///
/// Per center, members are inserted into Fenwick trees indexed by the global
/// rank of their value, so the mass and mass-weighted sum of the members
/// below `f_B` are available in `O(log n)` for every ball.
pub fn bmo_norm(space: &Space, f: &[f64]) -> Result<FunctionalResult, WeightError> {
    check_function(space, f)?;
    let n = space.len();
    let g = shifted_to_zero(f);
    let mut by_value: Vec<usize> = (0..n).collect();
    by_value.sort_unstable_by(|&a, &b| g[a].total_cmp(&g[b]).then(a.cmp(&b)));
    let mut slot = vec![0usize; n];
    for (pos, &i) in by_value.iter().enumerate() {
        slot[i] = pos;
    }
    let sorted: Vec<f64> = by_value.iter().map(|&i| g[i]).collect();

    let family = space.family();
    let measure = space.measure();
    let per_center: Vec<(f64, usize)> = (0..n)
        .into_par_iter()
        .map_init(
            || (fenwick::Fenwick::new(n), fenwick::Fenwick::new(n)),
            |(mass_tree, sum_tree), c| {
                mass_tree.clear();
                sum_tree.clear();
                let order = family.order(c);
                let mut pos = 0;
                let (mut total_mass, mut total_sum) = (0.0, 0.0);
                let mut best = (f64::NEG_INFINITY, 0);
                for (k, &end) in family.ends(c).iter().enumerate() {
                    for &i in &order[pos..end as usize] {
                        let i = i as usize;
                        let mass = measure[i];
                        mass_tree.add(slot[i], mass);
                        sum_tree.add(slot[i], mass * g[i]);
                        total_mass += mass;
                        total_sum += mass * g[i];
                    }
                    pos = end as usize;
                    let mean = total_sum / total_mass;
                    let below = sorted.partition_point(|&v| v < mean);
                    let (lo_mass, lo_sum) = (mass_tree.prefix(below), sum_tree.prefix(below));
                    let dev = (mean * lo_mass - lo_sum)
                        + ((total_sum - lo_sum) - mean * (total_mass - lo_mass));
                    let value = (dev / total_mass).max(0.0);
                    if value > best.0 {
                        best = (value, k);
                    }
                }
                best
            },
        )
        .collect();
    let mut best = (f64::NEG_INFINITY, BallId { center: 0, rank: 1 });
    for (center, (value, k)) in per_center.into_iter().enumerate() {
        if value > best.0 || (value == best.0 && k + 1 < best.1.rank) {
            best = (value, BallId { center, rank: k + 1 });
        }
    }
    Ok(FunctionalResult {
        kind: FunctionalKind::Bmo,
        value: best.0,
        witness: best.1,
        point: None,
    })
}

fn argmax(values: impl Iterator<Item = f64>) -> (f64, usize) {
    let mut best = (f64::NEG_INFINITY, 0);
    for (i, v) in values.enumerate() {
        if v > best.0 {
            best = (v, i);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use std::f64::consts::E;

    use super::*;
    use crate::space::MetricKind;

    fn two_point() -> Space {
        Space::from_matrix(vec![vec![0.0, 1.0], vec![1.0, 0.0]], vec![0.5, 0.5]).unwrap()
    }

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn worked_example_constants() {
        let s = two_point();
        let w = [1.0, E];
        assert_close(ap_constant(&s, &w, 2.0).unwrap().value, 1.27154, 1e-5);
        assert_close(a1_constant(&s, &w).unwrap().value, 1.85914, 1e-5);
        assert_close(ainf_constant(&s, &w).unwrap().value, 1.12763, 1e-5);
        assert_close(rhs_constant(&s, &w, 2.0).unwrap().value, 1.10162, 1e-5);
        assert_close(rhinf_constant(&s, &w).unwrap().value, 1.46212, 1e-5);
        let f = [0.0, 1.0];
        assert_eq!(blo_norm(&s, &f).unwrap().value, 0.5);
        assert_eq!(buo_norm(&s, &f).unwrap().value, 0.5);
        assert_close(bmo_norm(&s, &f).unwrap().value, 0.5, 1e-15);
    }

    #[test]
    fn witnesses_point_at_extrema() {
        let s = two_point();
        let a1 = a1_constant(&s, &[1.0, E]).unwrap();
        assert_eq!(a1.witness.rank, 2);
        assert_eq!(a1.point, Some(0));
        let rh = rhinf_constant(&s, &[1.0, E]).unwrap();
        assert_eq!(rh.point, Some(1));
    }

    #[test]
    fn constant_weight_gives_trivial_constants() {
        let s = Space::from_coordinates(
            (0..5).map(|i| vec![i as f64 * 0.7]).collect(),
            MetricKind::Euclidean,
            vec![0.2; 5],
        )
        .unwrap();
        let w = [3.0; 5];
        for v in [
            ap_constant(&s, &w, 3.0).unwrap().value,
            a1_constant(&s, &w).unwrap().value,
            ainf_constant(&s, &w).unwrap().value,
            rhs_constant(&s, &w, 1.5).unwrap().value,
            rhinf_constant(&s, &w).unwrap().value,
        ] {
            assert_close(v, 1.0, 1e-14);
        }
        for v in [
            bmo_norm(&s, &w).unwrap().value,
            blo_norm(&s, &w).unwrap().value,
            buo_norm(&s, &w).unwrap().value,
        ] {
            assert_close(v, 0.0, 1e-14);
        }
    }

    #[test]
    fn rejects_invalid_input() {
        let s = two_point();
        assert!(matches!(
            a1_constant(&s, &[1.0, 0.0]),
            Err(WeightError::NonpositiveWeight { index: 1, .. })
        ));
        assert!(matches!(
            ap_constant(&s, &[1.0, 2.0], 1.0),
            Err(WeightError::InvalidExponent { .. })
        ));
        assert!(matches!(
            blo_norm(&s, &[1.0]),
            Err(WeightError::LengthMismatch { .. })
        ));
        assert!(matches!(
            bmo_norm(&s, &[1.0, f64::NAN]),
            Err(WeightError::NonFinite { .. })
        ));
    }

    #[test]
    fn transforms() {
        let w = [1.0, E];
        assert_eq!(transform(&w, &Transform::Power(1.0)).unwrap(), w.to_vec());
        assert_eq!(transform(&w, &Transform::Inverse).unwrap(), vec![1.0, 1.0 / E]);
        let logs = transform(&w, &Transform::Log).unwrap();
        let back = transform(&logs, &Transform::Exp).unwrap();
        assert!(back.iter().zip(&w).all(|(a, b)| ((a - b) / b).abs() < 1e-14));
        assert!(matches!(
            transform(&[1.0, -1.0], &Transform::Log),
            Err(WeightError::NonpositiveWeight { index: 1, .. })
        ));
        assert!(transform(&[0.0, 2.0], &Transform::Inverse).is_err());
        assert_eq!(
            transform(&w, &Transform::Product(vec![2.0, 0.5])).unwrap(),
            vec![2.0, E / 2.0]
        );
    }

    #[test]
    fn weight_vector_flags() {
        let v = WeightVector::new(vec![0.0, 2.0]).unwrap();
        assert!(!v.is_strictly_positive());
        assert!(WeightVector::new(vec![-1.0]).is_err());
        assert_eq!(WeightVector::new(vec![0.5, 2.0]).unwrap().dynamic_range(), 4.0);
    }
}
