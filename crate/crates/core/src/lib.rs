//! Exact and numerical dimension theory for finite measures on the real line.
//!
//! * [`measure`]: symbolic measures (atoms, power-law atom families,
//!   piecewise densities, geometric block sequences, self-similar measures)
//!   with exact CDFs, set masses, restriction and sampling.
//! * [`metrics`]: total variation, absolute continuity and convergence checks
//!   in the weak, setwise and TV topologies.
//! * [`exact`]: closed-form dimension tables, the Bowen equation, exact
//!   correlation integrals.
//! * [`estimate`]: box counting, local dimensions, Grassberger–Procaccia and
//!   log–log fits.
//! * [`catalog`]: the worked example sequences, their expected values and a
//!   verification harness.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod certified;
pub mod error;
pub mod estimate;
pub mod exact;
pub mod measure;
pub mod metrics;
pub mod par;

pub use certified::Certified;
pub use error::{Error, Result};
pub use measure::{mix, BorelTestSet, Ifs, Interval, Piece, Skeleton, SymbolicMeasure};
pub use par::Execution;
