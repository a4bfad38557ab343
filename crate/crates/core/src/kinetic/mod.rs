//! Kinetic particle simulation of the rescaled fractional Fokker–Planck
//! equation with specular or absorbing walls, and the diffusion-limit study.

mod density;
mod diagnostics;
mod ensemble;
mod limit;

pub use density::{density, rect_disk_area, CellLayout, DensityField, HistogramGrid};
pub use diagnostics::{weighted_l2, PhaseGrid, WeightedL2, L2_BOOTSTRAP_ROUNDS, REFERENCE_SAMPLES};
pub use ensemble::{
    init_ensemble, step, BoundaryCondition, InitialLaw, Particle, ParticleEnsemble, StepStats, MAX_SUBSTEP_DEPTH,
};
pub use limit::{cell_averages, initial_node_values, limit_study, limit_study_with, macro_reference, LimitRow, LimitStudyConfig};
