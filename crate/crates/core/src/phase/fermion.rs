use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{cos_sin, real, CMatrix};
use crate::fock::{self, FermionSector, Ladder, Occupation, L_DOWN, L_UP, R_DOWN, R_UP};

/// Fermionic phase-difference operators on a fixed-`N_F` sector, together
/// with the orthonormal basis of the subspace the dynamics stays in.
#[derive(Debug, Clone)]
pub struct FermionPhaseOps {
    pub sector: FermionSector,
    /// Number of spin configurations normalizing the sums.
    pub n_c: usize,
    pub c: CMatrix,
    pub s: CMatrix,
    pub w: CMatrix,
    /// Parts of `c` and `s` coming from the vacuum-coupling terms alone.
    pub c_vac: CMatrix,
    pub s_vac: CMatrix,
    pub basis: Vec<Vec<Complex64>>,
}

impl FermionPhaseOps {
    pub fn n_f(&self) -> usize {
        self.sector.n_f
    }

    pub fn exp_phase(&self) -> CMatrix {
        &self.c + &self.s * super::I
    }

    /// Sector vector of a dynamics-subspace amplitude vector.
    pub fn embed(&self, c: &[Complex64]) -> Vec<Complex64> {
        fock::embed(&self.basis, c)
    }
}

pub fn spin_configurations(n_f: usize) -> usize {
    match n_f {
        2 => 2,
        3 => 4,
        n => panic!("no fermionic phase operators for {n} particles"),
    }
}

/// `|n_l = 1, n_r = 0><n_l = 0, n_r = 1|` on modes `(l, r)`, spectators untouched.
fn vacuum_coupling(sector: &FermionSector, l: usize, r: usize) -> DMatrix<f64> {
    let d = sector.dim();
    let mut m = DMatrix::zeros(d, d);
    for (col, &s) in sector.states().iter().enumerate() {
        if !fock::occupied(s, l) && fock::occupied(s, r) {
            let t: Occupation = (s | (1 << l)) & !(1 << r);
            m[(sector.index_of(t).unwrap(), col)] = 1.0;
        }
    }
    m
}

pub fn build_fermion_ops(n_f: usize) -> FermionPhaseOps {
    let n_c = spin_configurations(n_f);
    let sector = FermionSector::new(n_f);
    let d = sector.dim();
    let mut transfer = DMatrix::<f64>::zeros(d, d);
    let mut vacuum = DMatrix::<f64>::zeros(d, d);
    for l in [L_UP, L_DOWN] {
        for r in [R_UP, R_DOWN] {
            // (n_l + 1)^{-1/2} and (n_r + 1)^{-1/2} are 1 wherever a_l a_r^dag acts.
            transfer += sector.operator(&[Ladder::Annihilate(l), Ladder::Create(r)]);
            vacuum += vacuum_coupling(&sector, l, r);
        }
    }
    let scale = 1.0 / n_c as f64;
    let (c_vac, s_vac) = cos_sin(&real(&(vacuum * scale)));
    let (c_t, s_t) = cos_sin(&real(&(transfer * scale)));
    let w = real(&(sector.number(L_UP) + sector.number(L_DOWN) - sector.number(R_UP) - sector.number(R_DOWN)));
    let basis = fock::dynamics_basis(&sector);
    FermionPhaseOps { c: &c_t + &c_vac, s: &s_t + &s_vac, w, c_vac, s_vac, basis, n_c, sector }
}
