//! The fractional Laplacian, the specular diffusion operator, the half-space
//! kernel, bilinear forms and the velocity dissipation functional.

mod constant;
mod dissipation;
mod field;
mod kernel;
mod spectral;
mod specular;

pub use constant::{normalization_constant, normalization_constant_closed_form};
pub use dissipation::{dissipation, DissipationLattice, DissipationReport};
pub use field::{Constant, CosineMode, Field, FnField, Gaussian, GridFunction, RadialCosine};
pub use kernel::kernel_halfspace;
pub use spectral::{apply_multiplier, spectral_frac_laplacian, wavenumbers};
pub use specular::{
    apply_frac_laplacian, apply_specular_op, bilinear_form, sr_seminorm, OperatorConfig, SpatialRule, SpecularOperator,
    SphereRule, NEUMANN_TOL,
};
