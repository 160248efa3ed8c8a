//! Muckenhoupt and reverse Hölder weight theory on finite metric measure spaces.
//!
//! The crate is organised bottom-up:
//!
//! * [`space`] builds and validates finite metric measure spaces, indexes every
//!   ball, and measures doubling and annular-decay behaviour.
//! * [`operators`] evaluates the Hardy–Littlewood maximal and minimal functions
//!   and their signed ("natural") variants.
//! * [`weights`] computes the characteristic constants `[w]_p`, `[w]_1`,
//!   `[w]_∞`, reverse Hölder constants and the BMO/BLO/BUO oscillation norms.
//! * [`theorems`] turns the constant-explicit inequalities between those
//!   quantities into machine-checked [`theorems::CheckReport`]s.
//! * [`factorization`] builds and certifies refined Jones factorizations.
//!
//! Everything is exact up to floating point: on a finite space every open ball
//! is one of finitely many sub-level sets, so each supremum is a maximum over
//! an enumerable family.

pub mod factorization;
pub mod operators;
pub mod space;
pub mod theorems;
pub mod weights;

mod error;

pub use error::{Error, ParseError, SpaceError, WeightError};
pub use space::{Ball, BallFamily, BallId, MetricKind, Space};
