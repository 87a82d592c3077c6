//! Few-body tunneling and phase squeezing in a one-dimensional double well.
//!
//! The pipeline runs in order: solve the single-particle double well,
//! localize the lowest doublet, integrate the finite-range interaction
//! into on-site and inter-site couplings, evolve the two-mode Hamiltonian
//! and evaluate relative-phase statistics along the trajectory.

pub mod couplings;
pub mod dynamics;
pub mod eigensolver;
pub mod error;
pub mod fock;
pub mod model;
pub mod phase;
pub mod pipeline;
pub mod quadrature;
pub mod validation;

pub use couplings::{compute_couplings, derive_interaction, Couplings, InteractionParams};
pub use eigensolver::{localize, solve_fgh, Grid, LocalizedBasis, Spectrum};
pub use error::{CouplingError, DynamicsError, EigenError, ModelError, PipelineError, StateError};
pub use model::{dw_potential, ModelParams, ScatteringLength, Species};
