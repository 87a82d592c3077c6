use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::couplings::Couplings;

/// A real symmetric generator of `i dc/dt = H c`.
pub trait Generator {
    fn dim(&self) -> usize;
    /// `y = H x`.
    fn apply(&self, x: &[Complex64], y: &mut [Complex64]);
    fn dense(&self) -> DMatrix<f64>;
    /// Gershgorin enclosure `[lo, hi]` of the spectrum.
    fn spectral_bounds(&self) -> (f64, f64);

    /// `<c|H|c>`.
    fn energy(&self, c: &[Complex64]) -> f64 {
        let mut y = vec![Complex64::new(0.0, 0.0); self.dim()];
        self.apply(c, &mut y);
        c.iter().zip(&y).map(|(a, b)| (a.conj() * b).re).sum()
    }

    /// Upper bound on the spectral radius.
    fn norm_bound(&self) -> f64 {
        let (lo, hi) = self.spectral_bounds();
        lo.abs().max(hi.abs())
    }
}

/// Two-mode boson Hamiltonian in the basis `|l, N - l>`, stored as its
/// diagonal and first off-diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct BosonHamiltonian {
    pub n: usize,
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

pub fn build_boson_hamiltonian(n: usize, j: f64, couplings: &Couplings) -> BosonHamiltonian {
    assert!(n >= 1, "boson Hamiltonian needs at least one particle");
    let nf = n as f64;
    let diag = (0..=n)
        .map(|l| {
            let l = l as f64;
            let v_l = 0.5 * couplings.u_l * l * (l - 1.0);
            let v_r = 0.5 * couplings.u_r * (nf - l) * (nf - l - 1.0);
            let v_lr = 0.5 * couplings.u_lr * l * (nf - l);
            v_l + v_r + 2.0 * v_lr
        })
        .collect();
    let off = (0..n).map(|l| -j * (((l + 1) * (n - l)) as f64).sqrt()).collect();
    BosonHamiltonian { n, diag, off }
}

impl Generator for BosonHamiltonian {
    fn dim(&self) -> usize {
        self.n + 1
    }

    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        let n = self.n;
        for l in 0..=n {
            let mut acc = x[l] * self.diag[l];
            if l > 0 {
                acc += x[l - 1] * self.off[l - 1];
            }
            if l < n {
                acc += x[l + 1] * self.off[l];
            }
            y[l] = acc;
        }
    }

    fn dense(&self) -> DMatrix<f64> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |r, c| {
            if r == c {
                self.diag[r]
            } else if r + 1 == c {
                self.off[r]
            } else if c + 1 == r {
                self.off[c]
            } else {
                0.0
            }
        })
    }

    fn spectral_bounds(&self) -> (f64, f64) {
        gershgorin(&self.dense())
    }
}

fn gershgorin(m: &DMatrix<f64>) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for r in 0..m.nrows() {
        let radius: f64 = (0..m.ncols()).filter(|&c| c != r).map(|c| m[(r, c)].abs()).sum();
        lo = lo.min(m[(r, r)] - radius);
        hi = hi.max(m[(r, r)] + radius);
    }
    (lo, hi)
}

/// Fermion amplitude equations on the subspaces the dynamics stays in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FermionSystem {
    /// Basis: symmetric singlet, double-left, double-right.
    TwoFermion { j: f64, u: f64, u_lr: f64 },
    /// Basis: `|updown, up>`, `|updown, down>`, `|up, updown>`, `|down, updown>`.
    ThreeFermion { j: f64, u: f64, u_lr: f64 },
}

impl FermionSystem {
    pub fn n_f(&self) -> usize {
        match self {
            FermionSystem::TwoFermion { .. } => 2,
            FermionSystem::ThreeFermion { .. } => 3,
        }
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        match *self {
            FermionSystem::TwoFermion { j, u, u_lr } => {
                let h = -std::f64::consts::SQRT_2 * j;
                DMatrix::from_row_slice(3, 3, &[u_lr, h, h, h, u, 0.0, h, 0.0, u])
            }
            FermionSystem::ThreeFermion { j, u, u_lr } => {
                let d = u + 2.0 * u_lr;
                DMatrix::from_row_slice(4, 4, &[d, 0.0, -j, 0.0, 0.0, d, 0.0, -j, -j, 0.0, d, 0.0, 0.0, -j, 0.0, d])
            }
        }
    }
}

impl Generator for FermionSystem {
    fn dim(&self) -> usize {
        match self {
            FermionSystem::TwoFermion { .. } => 3,
            FermionSystem::ThreeFermion { .. } => 4,
        }
    }

    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        let m = self.matrix();
        for (r, out) in y.iter_mut().enumerate() {
            *out = (0..x.len()).map(|c| x[c] * m[(r, c)]).sum();
        }
    }

    fn dense(&self) -> DMatrix<f64> {
        self.matrix()
    }

    fn spectral_bounds(&self) -> (f64, f64) {
        gershgorin(&self.matrix())
    }
}
