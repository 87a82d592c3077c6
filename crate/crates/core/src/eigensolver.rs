//! Fourier-grid (sinc DVR) solver for the axial single-particle problem and
//! the left/right localized two-mode basis built from its lowest doublet.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::EigenError;

/// Minimum grid resolution accepted for production solves.
pub const MIN_GRID_POINTS: usize = 128;

/// Symmetric uniform grid `[-half_width, half_width]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    z_min: f64,
    z_max: f64,
    n_points: usize,
}

impl Grid {
    pub fn new(half_width: f64, n_points: usize) -> Result<Self, EigenError> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(EigenError::InvalidGrid(format!("half width must be positive, got {half_width}")));
        }
        if n_points < MIN_GRID_POINTS {
            return Err(EigenError::InvalidGrid(format!(
                "{n_points} points is below the minimum of {MIN_GRID_POINTS}"
            )));
        }
        if n_points.is_multiple_of(2) {
            return Err(EigenError::InvalidGrid(format!("{n_points} points: an odd count keeps z = 0 on the grid")));
        }
        Ok(Grid { z_min: -half_width, z_max: half_width, n_points })
    }

    /// `[-6, 6]` with 513 points.
    pub fn standard() -> Self {
        Grid::new(6.0, 513).expect("standard grid is valid")
    }

    pub fn z_min(&self) -> f64 {
        self.z_min
    }

    pub fn z_max(&self) -> f64 {
        self.z_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn spacing(&self) -> f64 {
        (self.z_max - self.z_min) / (self.n_points - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        // Mirror-exact: point(n-1-i) == -point(i).
        let half = (self.n_points - 1) / 2;
        (i as f64 - half as f64) * self.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.point(i)).collect()
    }

    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..self.n_points).map(|i| f(self.point(i))).collect()
    }
}

/// Lowest eigenpairs on a grid; wavefunctions are normalized so that
/// `sum |psi|^2 dz = 1`.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub grid: Grid,
    pub energies: Vec<f64>,
    pub wavefunctions: Vec<Vec<f64>>,
}

impl Spectrum {
    pub fn overlap(&self, i: usize, j: usize) -> f64 {
        inner(&self.wavefunctions[i], &self.wavefunctions[j], self.grid.spacing())
    }

    /// Gap to the third level over the doublet splitting, when available.
    pub fn tba_gap_ratio(&self) -> Option<f64> {
        match self.energies.as_slice() {
            [e0, e1, e2, ..] if e1 > e0 => Some((e2 - e1) / (e1 - e0)),
            _ => None,
        }
    }
}

pub(crate) fn inner(a: &[f64], b: &[f64], dz: f64) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() * dz
}

/// Exact plane-wave second derivative on an infinite uniform grid.
fn dvr_kinetic(n: usize, dz: f64) -> DMatrix<f64> {
    let diag = std::f64::consts::PI.powi(2) / (6.0 * dz * dz);
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            diag
        } else {
            let d = i as f64 - j as f64;
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            sign / (dz * dz * d * d)
        }
    })
}

/// Lowest `n_states` eigenpairs of `-1/2 d^2/dz^2 + V(z)` on `grid`.
pub fn solve_fgh(potential: &[f64], grid: &Grid, n_states: usize) -> Result<Spectrum, EigenError> {
    let n = grid.n_points();
    if potential.len() != n {
        return Err(EigenError::LengthMismatch { expected: n, got: potential.len() });
    }
    if n_states == 0 || n_states > n {
        return Err(EigenError::TooManyStates { requested: n_states, n_points: n });
    }
    let dz = grid.spacing();
    let mut h = dvr_kinetic(n, dz);
    for (i, v) in potential.iter().enumerate() {
        h[(i, i)] += v;
    }
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let norm = dz.sqrt().recip();
    let mut energies = Vec::with_capacity(n_states);
    let mut wavefunctions = Vec::with_capacity(n_states);
    for &k in order.iter().take(n_states) {
        energies.push(eig.eigenvalues[k]);
        let mut psi: Vec<f64> = eig.eigenvectors.column(k).iter().map(|x| x * norm).collect();
        fix_sign(&mut psi);
        wavefunctions.push(psi);
    }

    let edge = potential[0].min(potential[n - 1]);
    let highest = *energies.last().expect("n_states >= 1");
    if edge < 5.0 * highest {
        return Err(EigenError::GridTooSmall { edge, highest });
    }
    Ok(Spectrum { grid: grid.clone(), energies, wavefunctions })
}

/// Positive at the leftmost antinode.
fn fix_sign(psi: &mut [f64]) {
    let peak = psi.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let floor = 1e-3 * peak;
    let antinode = (1..psi.len().saturating_sub(1)).find(|&i| {
        let a = psi[i].abs();
        a >= floor && a >= psi[i - 1].abs() && a >= psi[i + 1].abs()
    });
    if let Some(i) = antinode {
        if psi[i] < 0.0 {
            psi.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// Left/right localized states from the lowest doublet.
#[derive(Debug, Clone)]
pub struct LocalizedBasis {
    pub grid: Grid,
    pub psi_l: Vec<f64>,
    pub psi_r: Vec<f64>,
    pub j: f64,
    pub e0: f64,
    pub e1: f64,
}

const PARITY_TOL: f64 = 1e-6;

fn parity_defect(psi: &[f64], parity: f64) -> f64 {
    let n = psi.len();
    let peak = psi.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    (0..n).map(|i| (psi[i] - parity * psi[n - 1 - i]).abs()).fold(0.0, f64::max) / peak
}

pub fn localize(spectrum: &Spectrum) -> Result<LocalizedBasis, EigenError> {
    if spectrum.energies.len() < 2 {
        return Err(EigenError::ParityCheck("need at least two states".into()));
    }
    let (psi0, psi1) = (&spectrum.wavefunctions[0], &spectrum.wavefunctions[1]);
    let even = parity_defect(psi0, 1.0);
    if even > PARITY_TOL {
        return Err(EigenError::ParityCheck(format!("ground state is not even (defect {even:.2e})")));
    }
    let odd = parity_defect(psi1, -1.0);
    if odd > PARITY_TOL {
        return Err(EigenError::ParityCheck(format!("first excited state is not odd (defect {odd:.2e})")));
    }

    let s = std::f64::consts::FRAC_1_SQRT_2;
    let plus: Vec<f64> = psi0.iter().zip(psi1).map(|(a, b)| s * (a + b)).collect();
    let minus: Vec<f64> = psi0.iter().zip(psi1).map(|(a, b)| s * (a - b)).collect();
    let grid = &spectrum.grid;
    let (mut psi_l, mut psi_r) =
        if left_mass(&plus, grid) >= left_mass(&minus, grid) { (plus, minus) } else { (minus, plus) };
    for psi in [&mut psi_l, &mut psi_r] {
        let peak = psi.iter().copied().fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
        if peak < 0.0 {
            psi.iter_mut().for_each(|x| *x = -*x);
        }
    }
    let (e0, e1) = (spectrum.energies[0], spectrum.energies[1]);
    Ok(LocalizedBasis { grid: grid.clone(), psi_l, psi_r, j: 0.5 * (e1 - e0), e0, e1 })
}

fn left_mass(psi: &[f64], grid: &Grid) -> f64 {
    let dz = grid.spacing();
    psi.iter().enumerate().filter(|(i, _)| grid.point(*i) < 0.0).map(|(_, x)| x * x * dz).sum()
}

impl LocalizedBasis {
    /// Probability mass of `psi_l` in `z < 0`.
    pub fn left_localization(&self) -> f64 {
        left_mass(&self.psi_l, &self.grid)
    }

    pub fn density_l(&self) -> Vec<f64> {
        self.psi_l.iter().map(|x| x * x).collect()
    }

    pub fn density_r(&self) -> Vec<f64> {
        self.psi_r.iter().map(|x| x * x).collect()
    }
}
