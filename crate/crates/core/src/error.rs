use std::fmt;

use thiserror::Error;

/// Location information attached to a malformed space document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub field: Option<String>,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(field) = &self.field {
            write!(f, "field `{field}`: ")?;
        }
        write!(f, "{}", self.message)?;
        if let (Some(line), Some(column)) = (self.line, self.column) {
            write!(f, " (line {line}, column {column})")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum SpaceError {
    #[error("space must contain at least one point")]
    Empty,
    #[error("dimension mismatch: expected {expected}, found {found} ({context})")]
    DimensionMismatch {
        expected: usize,
        found: usize,
        context: &'static str,
    },
    #[error("invalid distance d({i},{j}) = {value}")]
    InvalidDistance { i: usize, j: usize, value: f64 },
    #[error("asymmetric distance: d({i},{j}) = {forward} but d({j},{i}) = {backward}")]
    AsymmetricDistance {
        i: usize,
        j: usize,
        forward: f64,
        backward: f64,
    },
    #[error("distinct points {i} and {j} are at distance zero")]
    ZeroDistanceDistinctPoints { i: usize, j: usize },
    #[error(
        "triangle inequality violated: d({i},{k}) exceeds d({i},{j}) + d({j},{k}) by {excess:e}"
    )]
    TriangleViolation {
        i: usize,
        j: usize,
        k: usize,
        excess: f64,
    },
    #[error("measure of point {index} is {value}; point masses must be positive and finite")]
    NonpositiveMeasure { index: usize, value: f64 },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("no sampled radius reaches r_min = {r_min} (largest admissible radius {limit})")]
    EmptyRadiusRange { r_min: f64, limit: f64 },
    #[error("parse error: {0}")]
    Parse(ParseError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WeightError {
    #[error("weight must be strictly positive; entry {index} is {value}")]
    NonpositiveWeight { index: usize, value: f64 },
    #[error("function has {found} entries but the space has {expected} points")]
    LengthMismatch { expected: usize, found: usize },
    #[error("entry {index} is not finite ({value})")]
    NonFinite { index: usize, value: f64 },
    #[error("exponent {name} = {value} outside its admissible range {range}")]
    InvalidExponent {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
}

/// Crate-wide error, mostly used at the boundary (CLI, suite runner).
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error(transparent)]
    Factor(#[from] crate::factorization::FactorError),
}
