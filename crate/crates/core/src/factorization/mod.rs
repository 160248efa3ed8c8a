//! Refined Jones factorization `w = w₁w₂` with `w₁ ∈ A_1 ∩ RH_s` and
//! `w₂ ∈ A_p ∩ RH_∞`.
//!
//! On a finite space every positive `v₂` gives a factorization
//! `u = v₁ v₂^{1−q}` by setting `v₁ = u v₂^{q−1}`, so the work is in making the
//! two `A_1` constants small. [`jones_factor`] searches over `log v₂` and
//! returns the best pair found together with its certificates.

mod search;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use search::{jones_factor, FactorOptions, JonesResult, SearchStatus};

use crate::error::WeightError;
use crate::space::Space;
use crate::theorems::{inputs_digest, Assertion, CheckReport, Tolerances, Witness};
use crate::weights::{
    a1_constant, ap_constant, blo_norm, check_positive, dynamic_range, rhinf_constant,
    rhs_constant,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FactorError {
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error("inconsistent factor pair: {0}")]
    InconsistentPair(String),
}

/// The constants that certify a factor pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Certificates {
    pub a1_v1: f64,
    pub a1_v2: f64,
    pub a1_w1: f64,
    pub rhs_w1: f64,
    pub ap_w2: f64,
    pub rhinf_w2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorPair {
    pub v1: Vec<f64>,
    pub v2: Vec<f64>,
    pub w1: Vec<f64>,
    pub w2: Vec<f64>,
    pub p: f64,
    pub s: f64,
    pub q: f64,
    pub certificates: Certificates,
    /// Search outcome when the pair came from [`refined_jones`].
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub search: Option<SearchSummary>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchSummary {
    pub status: SearchStatus,
    pub objective: f64,
    pub initial_objective: f64,
    pub start: usize,
    pub sweeps: usize,
}

fn check_exponent(name: &'static str, value: f64) -> Result<(), FactorError> {
    if value.is_finite() && value > 1.0 {
        Ok(())
    } else {
        Err(WeightError::InvalidExponent {
            name,
            value,
            range: "(1, ∞)",
        }
        .into())
    }
}

/// `w₁ = v₁^{1/s}`, `w₂ = v₂^{1−p}`, with certificates.
pub fn refined_transform(
    space: &Space,
    v1: &[f64],
    v2: &[f64],
    p: f64,
    s: f64,
) -> Result<FactorPair, FactorError> {
    check_exponent("p", p)?;
    check_exponent("s", s)?;
    for v in [v1, v2] {
        if v.len() != space.len() {
            return Err(WeightError::LengthMismatch {
                expected: space.len(),
                found: v.len(),
            }
            .into());
        }
        check_positive(v)?;
    }
    let w1: Vec<f64> = v1.iter().map(|v| v.powf(1.0 / s)).collect();
    let w2: Vec<f64> = v2.iter().map(|v| v.powf(1.0 - p)).collect();
    let certificates = Certificates {
        a1_v1: a1_constant(space, v1)?.value,
        a1_v2: a1_constant(space, v2)?.value,
        a1_w1: a1_constant(space, &w1)?.value,
        rhs_w1: rhs_constant(space, &w1, s)?.value,
        ap_w2: ap_constant(space, &w2, p)?.value,
        rhinf_w2: rhinf_constant(space, &w2)?.value,
    };
    Ok(FactorPair {
        v1: v1.to_vec(),
        v2: v2.to_vec(),
        w1,
        w2,
        p,
        s,
        q: s * (p - 1.0) + 1.0,
        certificates,
        search: None,
    })
}

/// Factors `w` as `w₁w₂` through `u = wˢ = v₁ v₂^{1−q}`, `q = s(p − 1) + 1`.
pub fn refined_jones(
    space: &Space,
    w: &[f64],
    p: f64,
    s: f64,
    options: &FactorOptions,
) -> Result<FactorPair, FactorError> {
    check_exponent("p", p)?;
    check_exponent("s", s)?;
    check_positive(w)?;
    let u: Vec<f64> = w.iter().map(|v| v.powf(s)).collect();
    let q = s * (p - 1.0) + 1.0;
    let found = jones_factor(space, &u, q, options)?;
    let mut pair = refined_transform(space, &found.v1, &found.v2, p, s)?;
    pair.search = Some(SearchSummary {
        status: found.status,
        objective: found.objective,
        initial_objective: found.initial_objective,
        start: found.start,
        sweeps: found.sweeps,
    });
    Ok(pair)
}

/// Checks a factor pair against `w`:
/// reconstruction `w₁w₂ = w`;
/// `[w₁]_1 ≤ [v₁]_1^{1/s}` and `[w₁]_{RH_s} ≤ [v₁]_1^{1/s}`;
/// `[w₂]_{A_p} ≤ [v₂]_1^{p−1}`;
/// `C_{w₂} ≤ exp((p − 1)‖log v₂‖_BLO) ≤ [v₂]_1^{p−1}`.
pub fn verify_factorization(
    space: &Space,
    w: &[f64],
    pair: &FactorPair,
    tol: &Tolerances,
) -> Result<Vec<CheckReport>, FactorError> {
    let n = space.len();
    for (name, v) in [
        ("w", w),
        ("v1", &pair.v1[..]),
        ("v2", &pair.v2[..]),
        ("w1", &pair.w1[..]),
        ("w2", &pair.w2[..]),
    ] {
        if v.len() != n {
            return Err(FactorError::InconsistentPair(format!(
                "{name} has {} entries, the space has {n} points",
                v.len()
            )));
        }
    }
    let (p, s) = (pair.p, pair.s);
    check_exponent("p", p)?;
    check_exponent("s", s)?;
    if pair.q != s * (p - 1.0) + 1.0 {
        return Err(FactorError::InconsistentPair(format!(
            "q = {} but s(p - 1) + 1 = {}",
            pair.q,
            s * (p - 1.0) + 1.0
        )));
    }
    check_positive(w)?;
    let inputs = inputs_digest(space, &[w, &pair.v1, &pair.v2], &[p, s]);
    let range = dynamic_range(w);
    let mut out = Vec::with_capacity(4);

    let mut a = Assertion::new(tol, range);
    for x in 0..n {
        a.eq(pair.w1[x] * pair.w2[x] / w[x], 1.0, Witness::point(x));
    }
    out.push(a.finish("factor.reconstruction", inputs.clone()));

    let a1_v1 = a1_constant(space, &pair.v1)?.value;
    let a1_v2 = a1_constant(space, &pair.v2)?.value;
    let root = a1_v1.powf(1.0 / s);
    let a1_w1 = a1_constant(space, &pair.w1)?;
    let rhs_w1 = rhs_constant(space, &pair.w1, s)?;
    let mut a = Assertion::new(tol, range);
    a.le(a1_w1.value, root, Witness::ball(a1_w1.witness));
    a.le(rhs_w1.value, root, Witness::ball(rhs_w1.witness));
    out.push(a.finish("factor.w1", inputs.clone()));

    let bound = a1_v2.powf(p - 1.0);
    let ap_w2 = ap_constant(space, &pair.w2, p)?;
    let mut a = Assertion::new(tol, range);
    a.le(ap_w2.value, bound, Witness::ball(ap_w2.witness));
    out.push(a.finish("factor.w2", inputs.clone()));

    let log_v2: Vec<f64> = pair.v2.iter().map(|v| v.ln()).collect();
    let blo = blo_norm(space, &log_v2)?;
    let middle = ((p - 1.0) * blo.value).exp();
    let c = rhinf_constant(space, &pair.w2)?;
    let mut a = Assertion::new(tol, range);
    a.le(c.value, middle, Witness::ball(c.witness));
    a.le(middle, bound, Witness::ball(blo.witness));
    out.push(a.finish("factor.w2_rhinf", inputs));
    Ok(out)
}
