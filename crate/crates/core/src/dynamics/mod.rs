//! Potentials, split-step propagation and product-state diagnostics.

mod potential;
mod propagator;
mod schmidt;

pub use potential::{
    default_softening, hartree_self_potential, soft_coulomb, ExternalPotential, PotentialSpec,
};
pub use propagator::{
    evolve, evolve_with, step_count, strang_step, Evolve, EvolutionResult, Propagator, Snapshot,
    SplitStep1D, SplitStep2D,
};
pub use schmidt::{schmidt_purity, SchmidtSummary};
