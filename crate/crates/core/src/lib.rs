//! Numerical toolkit for surrogate-loss consistency bounds: a catalog of
//! evaluable losses, closed-form estimation-error transformations with
//! certificates, inf-sup solvers that recompute those transformations
//! from first principles, exact verification on finite-support
//! distributions, Monte-Carlo reproduction of the reference simulations,
//! and growth-rate certification.

pub mod aux_fn;
pub mod dist;
pub mod error;
pub mod growth;
pub mod hypothesis;
pub mod loss;
pub mod num;
pub mod opt;
pub mod risk;
pub mod selftest;
pub mod sim;
pub mod solver;
pub mod transform;
pub mod verify;

/// Concrete scalar used by the assembled machinery. The kernels in
/// [`num`], [`opt`] and [`aux_fn`] stay generic over [`num::Real`].
pub type Scalar = f64;

pub use aux_fn::{AuxFlags, AuxId, AuxiliaryFunction, LogBase};
pub use dist::{ConditionalPoint, DiscreteDistribution};
pub use error::{HcbError, Result};
pub use hypothesis::{ClassVariant, HypothesisClassSpec, LinearHypothesis};
pub use loss::{CompSumParams, SmoothAdvParams};
pub use transform::TransformCurve;
