//! Machine-checked inequalities between maximal functions, weight constants
//! and oscillation norms.
//!
//! Each check evaluates both sides of an inequality (or identity) with the
//! routines of [`crate::operators`] and [`crate::weights`] and records the
//! tightest instance as a [`CheckReport`]. Pointwise and per-ball statements
//! are checked at every point or ball; the report keeps the one closest to
//! failing.

mod checks;
mod suite;

use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use checks::{
    check_a1_characterization, check_commutation, check_converse_chain, check_duality,
    check_harnack, check_multiplier, check_oscillation_characterization, check_power_props,
    check_rhinf_characterization, report_unquantified, self_test_inverted,
};
pub use suite::{
    random_batch, run_batch, run_instance, run_suite, summary_csv, to_jsonl, BatchInstance,
    SuiteContext, SuiteParams, SuiteReport,
};

use crate::space::{BallId, Space};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// Reported value without a hard assertion.
    Soft,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Soft => "soft",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `lhs ≤ rhs`; margin is `rhs - lhs`.
    Le,
    /// `lhs = rhs`; margin is `|lhs - rhs|`.
    Eq,
    /// Informational; margin is `lhs / rhs`.
    Report,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ball: Option<BallId>,
}

impl Witness {
    pub fn point(x: usize) -> Self {
        Witness {
            point: Some(x),
            ball: None,
        }
    }

    pub fn ball(b: BallId) -> Self {
        Witness {
            point: None,
            ball: Some(b),
        }
    }

    pub fn at(x: usize, b: BallId) -> Self {
        Witness {
            point: Some(x),
            ball: Some(b),
        }
    }
}

/// Outcome of one check.
///
/// `tolerance` is the absolute slack actually applied, so that
/// `verdict == Pass` iff `margin >= -tolerance` for [`Relation::Le`] and
/// `margin <= tolerance` for [`Relation::Eq`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub id: String,
    pub inputs: String,
    pub relation: Relation,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub witness: Witness,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instance: Option<usize>,
}

impl CheckReport {
    pub fn is_hard(&self) -> bool {
        self.relation != Relation::Report
    }

    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }

    /// A failed entry for a check that could not be evaluated.
    pub fn errored(id: &str, inputs: String, err: impl fmt::Display) -> Self {
        CheckReport {
            id: id.to_string(),
            inputs,
            relation: Relation::Le,
            lhs: f64::NAN,
            rhs: f64::NAN,
            margin: f64::NAN,
            tolerance: 0.0,
            verdict: Verdict::Fail,
            witness: Witness::default(),
            note: Some(format!("error: {err}")),
            instance: None,
        }
    }

    /// An informational value `lhs / rhs`; `0 / 0` is reported as not
    /// applicable.
    pub fn soft(id: &str, inputs: String, lhs: f64, rhs: f64, witness: Witness) -> Self {
        let not_applicable = lhs == 0.0 && rhs == 0.0;
        CheckReport {
            id: id.to_string(),
            inputs,
            relation: Relation::Report,
            lhs,
            rhs,
            margin: if not_applicable { f64::NAN } else { lhs / rhs },
            tolerance: 0.0,
            verdict: Verdict::Soft,
            witness,
            note: not_applicable.then(|| "not applicable (0/0)".to_string()),
            instance: None,
        }
    }
}

/// Relative tolerances; the reference scale of a comparison is
/// `max(|lhs|, |rhs|, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub inequality: f64,
    pub equality: f64,
    /// Equality tolerance used when a weight's dynamic range exceeds
    /// `range_threshold`.
    pub relaxed_equality: f64,
    pub range_threshold: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            inequality: 1e-9,
            equality: 1e-12,
            relaxed_equality: 1e-9,
            range_threshold: 1e6,
        }
    }
}

impl Tolerances {
    /// Same tolerance for every comparison.
    pub fn uniform(tol: f64) -> Self {
        Tolerances {
            inequality: tol,
            equality: tol,
            relaxed_equality: tol,
            range_threshold: f64::INFINITY,
        }
    }

    pub fn equality_for(&self, dynamic_range: f64) -> f64 {
        if dynamic_range > self.range_threshold {
            self.relaxed_equality.max(self.equality)
        } else {
            self.equality
        }
    }
}

/// Hex SHA-256 identifying a check's inputs: the space plus every function
/// and scalar parameter, by bit pattern.
pub fn inputs_digest(space: &Space, functions: &[&[f64]], params: &[f64]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(space.digest().as_bytes());
    for f in functions {
        hasher.update((f.len() as u64).to_le_bytes());
        for v in *f {
            hasher.update(v.to_bits().to_le_bytes());
        }
    }
    for p in params {
        hasher.update(p.to_bits().to_le_bytes());
    }
    crate::space::hex(&hasher.finalize()[..8])
}

/// Accumulates many comparisons and keeps the one closest to failing.
///
/// Comparisons are ranked by their signed margin in units of the applicable
/// tolerance, so an identity off by half its tolerance ranks below an
/// inequality with a comfortable margin.
pub(crate) struct Assertion {
    le_tol: f64,
    eq_tol: f64,
    worst: Option<(f64, Relation, f64, f64, Witness)>,
}

impl Assertion {
    pub(crate) fn new(tol: &Tolerances, dynamic_range: f64) -> Self {
        Assertion {
            le_tol: tol.inequality,
            eq_tol: tol.equality_for(dynamic_range),
            worst: None,
        }
    }

    fn push(&mut self, relation: Relation, lhs: f64, rhs: f64, witness: Witness) {
        let scale = lhs.abs().max(rhs.abs()).max(1.0);
        let score = match relation {
            Relation::Le => (rhs - lhs) / (self.le_tol * scale),
            _ => -(lhs - rhs).abs() / (self.eq_tol * scale),
        };
        let score = if score.is_nan() || !lhs.is_finite() || !rhs.is_finite() {
            f64::NEG_INFINITY
        } else {
            score
        };
        let replace = match &self.worst {
            None => true,
            Some((s, ..)) => score < *s,
        };
        if replace {
            self.worst = Some((score, relation, lhs, rhs, witness));
        }
    }

    pub(crate) fn le(&mut self, lhs: f64, rhs: f64, witness: Witness) {
        self.push(Relation::Le, lhs, rhs, witness);
    }

    pub(crate) fn eq(&mut self, lhs: f64, rhs: f64, witness: Witness) {
        self.push(Relation::Eq, lhs, rhs, witness);
    }

    pub(crate) fn finish(self, id: &str, inputs: String) -> CheckReport {
        let (score, relation, lhs, rhs, witness) =
            self.worst.expect("assertion without comparisons");
        let scale = lhs.abs().max(rhs.abs()).max(1.0);
        let (margin, tolerance) = match relation {
            Relation::Le => (rhs - lhs, self.le_tol * scale),
            _ => ((lhs - rhs).abs(), self.eq_tol * scale),
        };
        CheckReport {
            id: id.to_string(),
            inputs,
            relation,
            lhs,
            rhs,
            margin,
            tolerance,
            verdict: if score >= -1.0 {
                Verdict::Pass
            } else {
                Verdict::Fail
            },
            witness,
            note: None,
            instance: None,
        }
    }
}
