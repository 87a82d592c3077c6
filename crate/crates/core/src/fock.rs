//! Occupation-number basis of four fermionic modes `(l up, l down, r up, r down)`.
//!
//! A basis state is a bitmask, bit `k` set when mode `k` is occupied, and
//! stands for `a_0^dag^{n_0} a_1^dag^{n_1} a_2^dag^{n_2} a_3^dag^{n_3} |0>`
//! (creation operators in ascending mode order). Moving an operator to mode
//! `k` therefore picks up `(-1)^{#occupied modes below k}`.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

pub const L_UP: usize = 0;
pub const L_DOWN: usize = 1;
pub const R_UP: usize = 2;
pub const R_DOWN: usize = 3;
pub const N_MODES: usize = 4;

pub type Occupation = u8;

pub fn occupied(state: Occupation, mode: usize) -> bool {
    state & (1 << mode) != 0
}

fn sign_below(state: Occupation, mode: usize) -> f64 {
    let below = (state & ((1u8 << mode) - 1)).count_ones();
    if below.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `a_mode^dag |state>`.
pub fn create(state: Occupation, mode: usize) -> Option<(Occupation, f64)> {
    if occupied(state, mode) {
        None
    } else {
        Some((state | (1 << mode), sign_below(state, mode)))
    }
}

/// `a_mode |state>`.
pub fn annihilate(state: Occupation, mode: usize) -> Option<(Occupation, f64)> {
    if occupied(state, mode) {
        Some((state & !(1 << mode), sign_below(state, mode)))
    } else {
        None
    }
}

/// A ladder operator in a product, applied right to left.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    Create(usize),
    Annihilate(usize),
}

pub fn apply_product(ops: &[Ladder], state: Occupation) -> Option<(Occupation, f64)> {
    ops.iter().rev().try_fold((state, 1.0), |(s, sign), op| {
        let (next, f) = match *op {
            Ladder::Create(m) => create(s, m)?,
            Ladder::Annihilate(m) => annihilate(s, m)?,
        };
        Some((next, sign * f))
    })
}

/// Fixed-particle-number sector, states in ascending bitmask order.
#[derive(Debug, Clone)]
pub struct FermionSector {
    pub n_f: usize,
    states: Vec<Occupation>,
    index: HashMap<Occupation, usize>,
}

impl FermionSector {
    pub fn new(n_f: usize) -> Self {
        let states: Vec<Occupation> = (0u8..(1 << N_MODES)).filter(|s| s.count_ones() as usize == n_f).collect();
        let index = states.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        FermionSector { n_f, states, index }
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[Occupation] {
        &self.states
    }

    pub fn index_of(&self, state: Occupation) -> Option<usize> {
        self.index.get(&state).copied()
    }

    /// Matrix of a number-conserving operator product.
    pub fn operator(&self, ops: &[Ladder]) -> DMatrix<f64> {
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for (col, &s) in self.states.iter().enumerate() {
            if let Some((t, sign)) = apply_product(ops, s) {
                let row = self.index_of(t).expect("product must conserve particle number");
                m[(row, col)] += sign;
            }
        }
        m
    }

    pub fn number(&self, mode: usize) -> DMatrix<f64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            self.dim(),
            self.states.iter().map(|&s| if occupied(s, mode) { 1.0 } else { 0.0 }),
        ))
    }

    /// Two-site Hubbard Hamiltonian with spin-conserving hopping `-J`,
    /// on-site `U_l`, `U_r` and inter-site density coupling `U_lr`.
    pub fn hamiltonian(&self, j: f64, u_l: f64, u_r: f64, u_lr: f64) -> DMatrix<f64> {
        let mut h = DMatrix::zeros(self.dim(), self.dim());
        for (l, r) in [(L_UP, R_UP), (L_DOWN, R_DOWN)] {
            h -= self.operator(&[Ladder::Create(l), Ladder::Annihilate(r)]) * j;
            h -= self.operator(&[Ladder::Create(r), Ladder::Annihilate(l)]) * j;
        }
        for (i, &s) in self.states.iter().enumerate() {
            let n = |m| if occupied(s, m) { 1.0 } else { 0.0 };
            let left = n(L_UP) + n(L_DOWN);
            let right = n(R_UP) + n(R_DOWN);
            h[(i, i)] += u_l * n(L_UP) * n(L_DOWN) + u_r * n(R_UP) * n(R_DOWN) + u_lr * left * right;
        }
        h
    }

    /// Column vector from `(occupation, amplitude)` pairs.
    pub fn vector(&self, terms: &[(Occupation, f64)]) -> Vec<Complex64> {
        let mut v = vec![Complex64::new(0.0, 0.0); self.dim()];
        for &(s, a) in terms {
            v[self.index_of(s).expect("state outside sector")] += a;
        }
        v
    }
}

pub const fn occ(l_up: bool, l_down: bool, r_up: bool, r_down: bool) -> Occupation {
    (l_up as u8) | ((l_down as u8) << 1) | ((r_up as u8) << 2) | ((r_down as u8) << 3)
}

/// Orthonormal basis of the subspace the dynamics lives in, as sector vectors.
///
/// Two fermions: `[(|up,down> + |down,up>)/sqrt 2, |updown, 0>, |0, updown>]`,
/// where the spatially symmetric singlet reads
/// `(a_{l up}^dag a_{r down}^dag - a_{l down}^dag a_{r up}^dag)|0>/sqrt 2` in creation order.
/// Three: `[|updown, up>, |updown, down>, |up, updown>, |down, updown>]`.
/// Signs are chosen so that the sector Hamiltonian restricted to these
/// vectors has hopping elements `-sqrt(2) J` (pair) or `-J` (three).
pub fn dynamics_basis(sector: &FermionSector) -> Vec<Vec<Complex64>> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    match sector.n_f {
        2 => vec![
            sector.vector(&[(occ(true, false, false, true), s), (occ(false, true, true, false), -s)]),
            sector.vector(&[(occ(true, true, false, false), 1.0)]),
            sector.vector(&[(occ(false, false, true, true), 1.0)]),
        ],
        3 => vec![
            sector.vector(&[(occ(true, true, true, false), 1.0)]),
            sector.vector(&[(occ(true, true, false, true), 1.0)]),
            sector.vector(&[(occ(true, false, true, true), -1.0)]),
            sector.vector(&[(occ(false, true, true, true), -1.0)]),
        ],
        n => panic!("no dynamics basis for {n} fermions"),
    }
}

/// `sum_k c_k basis_k`.
pub fn embed(basis: &[Vec<Complex64>], c: &[Complex64]) -> Vec<Complex64> {
    let d = basis[0].len();
    let mut out = vec![Complex64::new(0.0, 0.0); d];
    for (v, &a) in basis.iter().zip(c) {
        for (o, x) in out.iter_mut().zip(v) {
            *o += a * x;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn restricted(basis: &[Vec<Complex64>], h: &DMatrix<f64>) -> DMatrix<f64> {
        let k = basis.len();
        DMatrix::from_fn(k, k, |i, j| {
            let hv: Vec<Complex64> =
                (0..h.nrows()).map(|r| (0..h.ncols()).map(|c| basis[j][c] * h[(r, c)]).sum()).collect();
            basis[i].iter().zip(&hv).map(|(a, b)| a.conj() * b).sum::<Complex64>().re
        })
    }

    #[test]
    fn anticommutation() {
        let full: Vec<Occupation> = (0..16).collect();
        for &s in &full {
            for a in 0..N_MODES {
                for b in 0..N_MODES {
                    // {a_a, a_b^dag} = delta_ab
                    let ab = apply_product(&[Ladder::Annihilate(a), Ladder::Create(b)], s);
                    let ba = apply_product(&[Ladder::Create(b), Ladder::Annihilate(a)], s);
                    let mut acc: HashMap<Occupation, f64> = HashMap::new();
                    for (t, x) in ab.into_iter().chain(ba) {
                        *acc.entry(t).or_default() += x;
                    }
                    acc.retain(|_, v| *v != 0.0);
                    if a == b {
                        assert_eq!(acc.len(), 1);
                        assert_eq!(acc.get(&s), Some(&1.0));
                    } else {
                        assert!(acc.is_empty());
                    }
                }
            }
        }
    }

    #[test]
    fn sector_dimensions() {
        assert_eq!(FermionSector::new(2).dim(), 6);
        assert_eq!(FermionSector::new(3).dim(), 4);
        assert_eq!(FermionSector::new(4).dim(), 1);
    }

    #[test]
    fn pair_dynamics_closes_on_three_states() {
        let sector = FermionSector::new(2);
        let (j, u, u_lr) = (0.3, -0.7, 0.05);
        let h = sector.hamiltonian(j, u, u, u_lr);
        let basis = dynamics_basis(&sector);
        let r = restricted(&basis, &h);
        let s2 = 2f64.sqrt() * j;
        let want = DMatrix::from_row_slice(3, 3, &[u_lr, -s2, -s2, -s2, u, 0.0, -s2, 0.0, u]);
        assert!((r - want).abs().max() < 1e-14);
        // no leakage out of the subspace: |H v|^2 equals its projection
        for v in &basis {
            let hv: Vec<f64> = (0..6).map(|row| (0..6).map(|c| h[(row, c)] * v[c].re).sum()).collect();
            let total: f64 = hv.iter().map(|x| x * x).sum();
            let inside: f64 = basis.iter().map(|b| b.iter().zip(&hv).map(|(x, y)| x.re * y).sum::<f64>().powi(2)).sum();
            assert!((total - inside).abs() < 1e-14);
        }
    }

    #[test]
    fn three_fermion_dynamics_pairs_up() {
        let sector = FermionSector::new(3);
        let (j, u, u_lr) = (0.3, -0.7, 0.05);
        let r = restricted(&dynamics_basis(&sector), &sector.hamiltonian(j, u, u, u_lr));
        let d = u + 2.0 * u_lr;
        let want = DMatrix::from_row_slice(4, 4, &[d, 0.0, -j, 0.0, 0.0, d, 0.0, -j, -j, 0.0, d, 0.0, 0.0, -j, 0.0, d]);
        assert!((r - want).abs().max() < 1e-14);
    }
}
