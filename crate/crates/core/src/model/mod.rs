//! Shared domain types: observations, step CDFs, step densities, analytic
//! ground-truth densities and the seeded RNG contract.

mod density;
mod fraction;
mod observation;
mod piecewise;
mod rng;
mod step_cdf;

pub use density::{DensityKind, DensitySpec, Piece, ValleyInfo};
pub use fraction::Fraction;
pub use observation::{derive_ratios, Label, ObservationSet, Truth};
pub use piecewise::{eval_density, Monotone, PiecewiseConstantDensity};
pub use rng::RngContract;
pub use step_cdf::StepCdf;
