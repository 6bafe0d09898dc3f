//! Numerical laboratory for Muckenhoupt weights on the line and the circle.
//!
//! Functions live on uniform dyadic grids of an interval ([`grid::GridFunction`]),
//! with cell values equal to exact cell averages of closed-form generators
//! ([`grid::ClosedForm`]). On top of that the crate provides the restricted
//! Hardy–Littlewood maximal operator, `A_p` constants, reverse Hölder
//! exponents, `A_1` majorant constructions with self-checking certificates,
//! membership classifiers, and outer functions on the circle.

// Negated comparisons are used on purpose so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod grid;
pub mod hardy;
pub mod majorant;
pub mod maximal;
pub mod par;
pub mod weights;

pub use error::{Error, Result};
pub use grid::{ClosedForm, GridFunction, Interval, TrendConfig, TrendReport, Verdict};
pub use maximal::WindowFamily;
pub use par::Exec;
pub use weights::Weight;
