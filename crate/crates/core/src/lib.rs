//! Simulation and verification toolkit for the sex-linked hemophilia
//! evolution operator on the simplex of genotype frequencies
//! `{XX, XXh; XY, XhY}` and for its reduced two-dimensional system on the
//! ratios `y/x`, `v/u`.
//!
//! Every operator is generic over [`Scalar`], with exact rationals and
//! binary64 floats as the two instantiations. The aliases below name the
//! concrete types used by the command line front end.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod operators;
pub mod scalar;
pub mod state;
pub mod verify;

pub use error::{Error, Result, Sex};
pub use scalar::{ArithMode, Scalar};
pub use state::{l1_distance, PopulationState, RawState4, ReducedState};

/// Exact arbitrary-precision rational.
pub type Rational = dashu_ratio::RBig;

pub type ExactState = PopulationState<Rational>;
pub type FloatState = PopulationState<f64>;
pub type ExactReduced = ReducedState<Rational>;
pub type FloatReduced = ReducedState<f64>;
pub type ExactOperator = operators::GonosomalOperator<Rational>;
pub type FloatOperator = operators::GonosomalOperator<f64>;
pub type ExactTrajectory = analysis::Trajectory<Rational>;
pub type FloatTrajectory = analysis::Trajectory<f64>;
