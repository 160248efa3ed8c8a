//! Doubling and annular-decay constants.
//!
//! Both quantities are suprema over a continuum of radii, but ball measures
//! are step functions of the radius with jumps only at realised distances, so
//! finitely many representatives suffice.

use serde::{Deserialize, Serialize};

use super::Space;
use crate::error::SpaceError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoublingResult {
    /// `sup μ(B(x,2r)) / μ(B(x,r))`.
    pub value: f64,
    pub center: usize,
    /// The supremum is attained for every `r` in `(radius_lo, radius_hi]`.
    pub radius_lo: f64,
    pub radius_hi: f64,
}

/// Exact doubling constant.
///
/// For a center `x` with distinct distances `D_x`, both `μ(B(x,r))` and
/// `μ(B(x,2r))` are constant on every interval between consecutive points of
/// `D_x ∪ D_x/2`; on `(s, s']` they equal the closed-ball masses at `s` and
/// `2s`. An unbounded last interval is reported with `radius_hi = ∞`.
pub fn doubling_constant(space: &Space) -> DoublingResult {
    let family = space.family();
    let mut best = DoublingResult {
        value: 1.0,
        center: 0,
        radius_lo: 0.0,
        radius_hi: f64::INFINITY,
    };
    let mut breaks = Vec::new();
    for center in 0..space.len() {
        let radii = family.radii(center);
        breaks.clear();
        breaks.extend_from_slice(radii);
        breaks.extend(radii.iter().map(|d| d / 2.0));
        breaks.sort_unstable_by(f64::total_cmp);
        breaks.dedup();
        for (i, &lo) in breaks.iter().enumerate() {
            let inner = family.closed_ball_mass(center, lo);
            let outer = family.closed_ball_mass(center, 2.0 * lo);
            let ratio = outer / inner;
            if ratio > best.value {
                best = DoublingResult {
                    value: ratio,
                    center,
                    radius_lo: lo,
                    radius_hi: breaks.get(i + 1).copied().unwrap_or(f64::INFINITY),
                };
            }
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnularWitness {
    pub center: usize,
    pub radius: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnularDecayQuery {
    pub alpha: f64,
    pub r_min: f64,
    /// Smallest `C` with `μ(B(x,r) \ B(x,(1-δ)r)) ≤ C δ^α μ(B(x,r))` over the
    /// sampled radii and all critical `δ`.
    pub constant: f64,
    pub witness: Option<AnnularWitness>,
}

/// Sampled radii for `center`: one representative per gap between
/// consecutive distinct distances (its midpoint) and `2·d_max` for the
/// unbounded last gap. The representatives do not depend on `r_min`, so the
/// constant is monotone in the cutoff.
pub(crate) fn annular_sample_radii(radii: &[f64]) -> impl Iterator<Item = (usize, f64)> + '_ {
    let last = radii.len() - 1;
    (0..radii.len()).filter(move |_| last > 0).map(move |k| {
        let r = if k < last {
            0.5 * (radii[k] + radii[k + 1])
        } else {
            2.0 * radii[k]
        };
        (k, r)
    })
}

/// Annular-decay constant over radii `r ≥ r_min`.
///
/// For a fixed ball the annulus measure only changes when the inner radius
/// `(1-δ)r` crosses a realised distance `d'`, while `δ^α` grows with `δ`; the
/// supremum in `δ` is therefore attained on the finite set
/// `δ = 1 - d'/r, 0 < d' < r`. Radii are sampled per breakpoint interval by
/// [`annular_sample_radii`]: near a realised distance the ratio is unbounded
/// on any finite space, which is why a cutoff is mandatory.
pub fn annular_decay_constant(
    space: &Space,
    alpha: f64,
    r_min: f64,
) -> Result<AnnularDecayQuery, SpaceError> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(SpaceError::InvalidParams(format!("alpha = {alpha} must lie in [0, 1]")));
    }
    if !(r_min.is_finite() && r_min > 0.0) {
        return Err(SpaceError::InvalidParams(format!("r_min = {r_min} must be positive")));
    }
    let mut query = AnnularDecayQuery {
        alpha,
        r_min,
        constant: 0.0,
        witness: None,
    };
    if space.len() == 1 {
        return Ok(query);
    }
    let limit = 2.0 * space.diameter();
    if r_min > limit {
        return Err(SpaceError::EmptyRadiusRange { r_min, limit });
    }

    let family = space.family();
    for center in 0..space.len() {
        let radii = family.radii(center);
        let masses = family.masses(center);
        for (k, r) in annular_sample_radii(radii) {
            if r < r_min {
                continue;
            }
            // B(x, r) is the closed ball at radii[k].
            let ball = masses[k];
            for j in 1..=k {
                let delta = 1.0 - radii[j] / r;
                let annulus = ball - masses[j - 1];
                let ratio = annulus / (delta.powf(alpha) * ball);
                if query.witness.is_none() || ratio > query.constant {
                    query.constant = ratio;
                    query.witness = Some(AnnularWitness {
                        center,
                        radius: r,
                        delta,
                    });
                }
            }
        }
    }
    Ok(query)
}
