//! Number- and phase-difference operators and their statistics.
//!
//! Operators are dense complex matrices on fixed-particle-number sectors.
//! Sectors stay small (at most a few dozen states), so every algebraic
//! identity can be checked entry by entry.

mod boson;
mod fermion;
mod stats;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub use boson::{build_boson_ops, BosonPhaseOps, BosonSector};
pub use fermion::{build_fermion_ops, FermionPhaseOps};
pub use stats::{
    boson_stats, boson_stats_amplitudes, cn_stats, fermion_stats, fermion_stats_sector, Flavor, PhaseStats,
    NORM_TOLERANCE,
};

pub type CMatrix = DMatrix<Complex64>;

pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// Largest entry modulus, the norm every identity is checked in.
pub fn max_entry(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    max_entry(&(m - m.adjoint()))
}

pub(crate) fn to_vector(c: &[Complex64]) -> DVector<Complex64> {
    DVector::from_column_slice(c)
}

pub(crate) fn norm_sqr(c: &[Complex64]) -> f64 {
    c.iter().map(|z| z.norm_sqr()).sum()
}

pub(crate) fn real(m: &DMatrix<f64>) -> CMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}

/// `(E + E^dag)/2` and `(E - E^dag)/(2i)`.
pub(crate) fn cos_sin(e: &CMatrix) -> (CMatrix, CMatrix) {
    let ed = e.adjoint();
    let c = (e + &ed).scale(0.5);
    let s = (e - &ed) / (I * 2.0);
    (c, s)
}
