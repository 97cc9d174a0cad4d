//! Distances between symbolic measures and convergence checks.

mod convergence;
mod tv;

pub use convergence::{
    setwise_converges, tv_converges, weak_converges, ConvergenceVerdict, Generator, MeasureSequence, Mode, Status,
    Witness,
};
pub use tv::{
    abs_continuous, common_atom_support, equivalent, scheffe_l1, signed_parts, tv_distance, tv_distance_certified,
    SignedParts,
};
