//! Amplitude dynamics of the two-mode boson and few-fermion Hamiltonians.

mod analytic;
mod hamiltonian;
mod propagate;

pub use analytic::{
    three_fermion_analytic, three_fermion_start, tunneling_probabilities, two_fermion_analytic, PairStart,
};
pub use hamiltonian::{build_boson_hamiltonian, BosonHamiltonian, FermionSystem, Generator};
pub use propagate::{
    check_step, default_step, evolve, evolve_spectral, evolve_with, max_deviation, Backend, StateTrajectory, TimeGrid,
    DEFAULT_STEP_FRACTION, MAX_STEP_NORM, NORM_DRIFT_LIMIT,
};
