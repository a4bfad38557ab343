//! Specular and absorbing anomalous diffusion: billiard geometry, stable
//! velocity sampling, nonlocal operators, a kinetic particle simulator and
//! macroscopic fractional heat solvers.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod geometry;
pub mod kinetic;
pub mod macroscopic;
pub mod operators;
pub mod quad;
pub mod rng;
pub mod stable;
pub mod stats;

pub use error::{Error, ErrorClass, Result};
pub use geometry::{DomainShape, JacobianBundle, ReverseMap, TrajectoryOutcome};
pub use operators::{Field, GridFunction, OperatorConfig};
pub use stable::{EquilibriumSpec, StableParams};
