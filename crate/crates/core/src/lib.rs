//! Mixed polynotopes: polynomial functions of typed symbols used as sets.
//!
//! Symbols carry one of four types (unspecified, interval, signed, boolean)
//! and are allocated by a process-wide provider so that two sets share a
//! symbol only when one was derived from the other. On top of that sit the
//! polynotope algebra, mixed interval encodings, logic-gate polynomials,
//! enclosures of non-polynomial functions, the polynotopic Kalman filter and
//! a small reachability engine with the bundled scenarios.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod logic;
pub mod mixedenc;
pub mod mlc;
pub mod nonlinear;
pub mod pkf;
pub mod polynotope;
pub mod reach;
pub mod symbols;

pub use error::{Error, Result};
pub use mlc::Mlc;
pub use polynotope::{IntervalVec, Monomial, Polynotope, Weighting};
pub use symbols::{Flavor, SymbolId, SymbolType};
