//! Simulation and analysis of random discontinuous motion (RDM) of quantum particles.
//!
//! The crate propagates one- and two-particle wave functions with a spectral
//! split-step scheme, draws discontinuous trajectories whose positions are
//! distributed as `|ψ|²`, rebuilds position densities from those trajectories,
//! and reconstructs `ψ` from its density and local velocity field.

pub mod density;
pub mod dynamics;
pub mod error;
pub mod grid;
pub mod io;
pub mod reconstruct;
pub mod sampler;
pub mod scenarios;
mod spectral;

pub use error::{Error, Result};
pub use grid::{Grid1D, State, WaveFunction1D, WaveFunction2D};

pub use num_complex::Complex64;
