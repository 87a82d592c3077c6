use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::hamiltonian::Generator;
use crate::error::{DynamicsError, StateError};

/// RK4 refuses steps with `dt * ||H - sigma|| ` above this.
pub const MAX_STEP_NORM: f64 = 0.05;
/// Largest tolerated `| |c|^2 - 1 |` at any stored sample.
pub const NORM_DRIFT_LIMIT: f64 = 1e-9;
/// Default step is this fraction of the inverse largest energy scale.
pub const DEFAULT_STEP_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    #[default]
    Rk4,
    Spectral,
}

/// Sample `k` sits at `t = k * stride * dt`, for `k` in `0..samples`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub dt: f64,
    pub stride: usize,
    pub samples: usize,
    /// `tau = tau_scale * t`; the tunneling energy `J` for the usual `tau = J t`.
    pub tau_scale: f64,
}

impl TimeGrid {
    pub fn new(dt: f64, stride: usize, samples: usize, tau_scale: f64) -> Result<Self, DynamicsError> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(DynamicsError::InvalidTimes(format!("dt must be positive, got {dt}")));
        }
        if stride == 0 || samples == 0 {
            return Err(DynamicsError::InvalidTimes("stride and sample count must be positive".into()));
        }
        Ok(TimeGrid { dt, stride, samples, tau_scale })
    }

    /// `samples` points evenly covering `[0, t_max]`, each interval split
    /// into the fewest RK4 steps no longer than `dt_max`.
    pub fn spanning(t_max: f64, samples: usize, dt_max: f64, tau_scale: f64) -> Result<Self, DynamicsError> {
        if !(t_max > 0.0 && t_max.is_finite()) || samples < 2 {
            return Err(DynamicsError::InvalidTimes(format!(
                "need t_max > 0 and at least 2 samples, got t_max = {t_max}, samples = {samples}"
            )));
        }
        if !(dt_max > 0.0) {
            return Err(DynamicsError::InvalidTimes(format!("dt must be positive, got {dt_max}")));
        }
        let interval = t_max / (samples - 1) as f64;
        let stride = (interval / dt_max).ceil().max(1.0) as usize;
        TimeGrid::new(interval / stride as f64, stride, samples, tau_scale)
    }

    pub fn time(&self, k: usize) -> f64 {
        (k * self.stride) as f64 * self.dt
    }

    pub fn t_max(&self) -> f64 {
        self.time(self.samples - 1)
    }
}

/// `fraction / max(J, |U0|, |U_lr|, ||H||)`.
pub fn default_step(h: &impl Generator, scales: &[f64], fraction: f64) -> f64 {
    let s = scales.iter().fold(h.norm_bound(), |m, x| m.max(x.abs()));
    if s > 0.0 {
        fraction / s
    } else {
        fraction
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateTrajectory {
    pub label: String,
    pub times: Vec<f64>,
    pub taus: Vec<f64>,
    pub states: Vec<Vec<Complex64>>,
}

impl StateTrajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn max_norm_drift(&self) -> f64 {
        self.states.iter().map(|c| (norm_sqr(c) - 1.0).abs()).fold(0.0, f64::max)
    }
}

pub(crate) fn norm_sqr(c: &[Complex64]) -> f64 {
    c.iter().map(|z| z.norm_sqr()).sum()
}

fn check_initial(h: &impl Generator, c0: &[Complex64]) -> Result<(), DynamicsError> {
    if c0.len() != h.dim() {
        return Err(StateError::DimensionMismatch { expected: h.dim(), got: c0.len() }.into());
    }
    let n = norm_sqr(c0);
    if (n - 1.0).abs() > crate::phase::NORM_TOLERANCE {
        return Err(StateError::Unnormalized(n).into());
    }
    Ok(())
}

/// Generator shifted by the centre of its spectral enclosure. RK4 integrates
/// `H - sigma`; the exact phase `exp(-i sigma t)` is restored at each sample.
struct Shifted<'a, G> {
    h: &'a G,
    sigma: f64,
}

impl<G: Generator> Shifted<'_, G> {
    /// `y = -i (H - sigma) x`.
    fn rhs(&self, x: &[Complex64], y: &mut [Complex64]) {
        self.h.apply(x, y);
        for (yi, xi) in y.iter_mut().zip(x) {
            let v = *yi - xi * self.sigma;
            *yi = Complex64::new(v.im, -v.re);
        }
    }
}

/// Stability precondition of RK4 on the shifted generator.
pub fn check_step(h: &impl Generator, dt: f64) -> Result<(), DynamicsError> {
    let (lo, hi) = h.spectral_bounds();
    let step_norm = dt * 0.5 * (hi - lo);
    if step_norm > MAX_STEP_NORM {
        return Err(DynamicsError::StepTooLarge(step_norm));
    }
    Ok(())
}

pub fn evolve(
    h: &impl Generator,
    c0: &[Complex64],
    grid: &TimeGrid,
    label: &str,
) -> Result<StateTrajectory, DynamicsError> {
    check_initial(h, c0)?;
    check_step(h, grid.dt)?;
    let (lo, hi) = h.spectral_bounds();
    let sigma = 0.5 * (lo + hi);
    let shifted = Shifted { h, sigma };
    let d = h.dim();
    let dt = grid.dt;
    let zero = Complex64::new(0.0, 0.0);
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) =
        (vec![zero; d], vec![zero; d], vec![zero; d], vec![zero; d], vec![zero; d]);
    let mut c = c0.to_vec();

    let mut traj = StateTrajectory {
        label: label.to_string(),
        times: Vec::with_capacity(grid.samples),
        taus: Vec::with_capacity(grid.samples),
        states: Vec::with_capacity(grid.samples),
    };
    for k in 0..grid.samples {
        if k > 0 {
            for _ in 0..grid.stride {
                shifted.rhs(&c, &mut k1);
                for i in 0..d {
                    tmp[i] = c[i] + k1[i] * (0.5 * dt);
                }
                shifted.rhs(&tmp, &mut k2);
                for i in 0..d {
                    tmp[i] = c[i] + k2[i] * (0.5 * dt);
                }
                shifted.rhs(&tmp, &mut k3);
                for i in 0..d {
                    tmp[i] = c[i] + k3[i] * dt;
                }
                shifted.rhs(&tmp, &mut k4);
                for i in 0..d {
                    c[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (dt / 6.0);
                }
            }
        }
        let drift = (norm_sqr(&c) - 1.0).abs();
        if drift > NORM_DRIFT_LIMIT {
            return Err(DynamicsError::NormDriftExceeded(drift));
        }
        let t = grid.time(k);
        let phase = Complex64::from_polar(1.0, -sigma * t);
        traj.times.push(t);
        traj.taus.push(grid.tau_scale * t);
        traj.states.push(c.iter().map(|z| z * phase).collect());
    }
    Ok(traj)
}

/// Exact propagation `c(t) = V exp(-i Lambda t) V^T c0` on the same grid.
pub fn evolve_spectral(
    h: &impl Generator,
    c0: &[Complex64],
    grid: &TimeGrid,
    label: &str,
) -> Result<StateTrajectory, DynamicsError> {
    check_initial(h, c0)?;
    let eig = SymmetricEigen::new(h.dense());
    let v = &eig.eigenvectors;
    let d = h.dim();
    let proj: Vec<Complex64> = (0..d).map(|m| (0..d).map(|i| c0[i] * v[(i, m)]).sum()).collect();
    let mut traj = StateTrajectory {
        label: label.to_string(),
        times: Vec::with_capacity(grid.samples),
        taus: Vec::with_capacity(grid.samples),
        states: Vec::with_capacity(grid.samples),
    };
    for k in 0..grid.samples {
        let t = grid.time(k);
        let rotated: Vec<Complex64> =
            (0..d).map(|m| proj[m] * Complex64::from_polar(1.0, -eig.eigenvalues[m] * t)).collect();
        let c: Vec<Complex64> = (0..d).map(|i| (0..d).map(|m| rotated[m] * v[(i, m)]).sum()).collect();
        traj.times.push(t);
        traj.taus.push(grid.tau_scale * t);
        traj.states.push(c);
    }
    Ok(traj)
}

pub fn evolve_with(
    backend: Backend,
    h: &impl Generator,
    c0: &[Complex64],
    grid: &TimeGrid,
    label: &str,
) -> Result<StateTrajectory, DynamicsError> {
    match backend {
        Backend::Rk4 => evolve(h, c0, grid, label),
        Backend::Spectral => evolve_spectral(h, c0, grid, label),
    }
}

/// Largest amplitude-wise distance between two trajectories on one grid.
pub fn max_deviation(a: &StateTrajectory, b: &StateTrajectory) -> f64 {
    a.states.iter().zip(&b.states).flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).norm())).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::super::hamiltonian::{build_boson_hamiltonian, FermionSystem};
    use super::*;
    use crate::couplings::Couplings;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn rabi_oscillation() {
        let j = 0.3;
        let h = build_boson_hamiltonian(1, j, &Couplings::on_site(0.0, 0.0));
        let grid = TimeGrid::spanning(20.0, 201, 0.01, j).unwrap();
        let traj = evolve(&h, &[c(0.0), c(1.0)], &grid, "rabi").unwrap();
        for (t, s) in traj.times.iter().zip(&traj.states) {
            assert!((s[1].norm_sqr() - (j * t).cos().powi(2)).abs() < 1e-10);
        }
    }

    #[test]
    fn grid_layout() {
        let g = TimeGrid::spanning(10.0, 11, 0.3, 2.0).unwrap();
        assert_eq!(g.stride, 4);
        assert!((g.t_max() - 10.0).abs() < 1e-12);
        assert!((g.time(3) - 3.0).abs() < 1e-12);
        assert!(TimeGrid::spanning(10.0, 1, 0.1, 1.0).is_err());
        assert!(TimeGrid::new(0.0, 1, 5, 1.0).is_err());
    }

    #[test]
    fn step_policy_and_input_checks() {
        let h = build_boson_hamiltonian(4, 1.0, &Couplings::on_site(-1.0, 0.0));
        let grid = TimeGrid::new(0.1, 1, 3, 1.0).unwrap();
        let c0 = {
            let mut v = vec![c(0.0); 5];
            v[0] = c(1.0);
            v
        };
        assert!(matches!(evolve(&h, &c0, &grid, ""), Err(DynamicsError::StepTooLarge(_))));
        let fine = TimeGrid::new(1e-3, 1, 3, 1.0).unwrap();
        assert!(matches!(evolve(&h, &c0[..3], &fine, ""), Err(DynamicsError::State(_))));
        assert!(matches!(evolve(&h, &[c(1.0); 5], &fine, ""), Err(DynamicsError::State(_))));
    }

    #[test]
    fn norm_drift_is_detected() {
        // A step at the policy limit over many periods loses norm at O((h lambda)^6) per step.
        let h = FermionSystem::TwoFermion { j: 1.0, u: 0.0, u_lr: 0.0 };
        let (lo, hi) = h.spectral_bounds();
        let dt = MAX_STEP_NORM / (0.5 * (hi - lo));
        let grid = TimeGrid::new(dt, 200_000, 2, 1.0).unwrap();
        assert!(matches!(evolve(&h, &[c(1.0), c(0.0), c(0.0)], &grid, ""), Err(DynamicsError::NormDriftExceeded(_))));
    }

    #[test]
    fn matches_spectral_oracle_and_conserves_energy() {
        let (j, u0, ulr) = (0.024, -0.17, 0.0003);
        for n in [2, 5, 10] {
            let h = build_boson_hamiltonian(n, j, &Couplings::on_site(u0, ulr));
            let dt = default_step(&h, &[j, u0, ulr], 0.002);
            let grid = TimeGrid::spanning(40.0 / j, 401, dt, j).unwrap();
            let mut c0 = vec![c(0.0); n + 1];
            c0[n] = c(1.0);
            let a = evolve(&h, &c0, &grid, "rk4").unwrap();
            let b = evolve_spectral(&h, &c0, &grid, "exact").unwrap();
            assert!(max_deviation(&a, &b) < 1e-8, "n={n}: {}", max_deviation(&a, &b));
            let e0 = h.energy(&c0);
            for s in &a.states {
                assert!((h.energy(s) - e0).abs() < 1e-8);
            }
            assert!(a.max_norm_drift() < 1e-9);
        }
    }

    #[test]
    fn fourth_order_convergence() {
        let h = build_boson_hamiltonian(6, 0.05, &Couplings::on_site(-0.3, 0.0));
        let mut c0 = vec![c(0.0); 7];
        c0[6] = c(1.0);
        let dt = 0.01;
        let coarse = TimeGrid::new(dt, 400, 6, 0.05).unwrap();
        let fine = TimeGrid::new(dt / 2.0, 800, 6, 0.05).unwrap();
        let exact = evolve_spectral(&h, &c0, &coarse, "").unwrap();
        let e1 = max_deviation(&evolve(&h, &c0, &coarse, "").unwrap(), &exact);
        let e2 = max_deviation(&evolve(&h, &c0, &fine, "").unwrap(), &exact);
        let ratio = e1 / e2;
        assert!((ratio - 16.0).abs() < 1.0, "ratio {ratio}");
    }

    #[test]
    fn mirrored_start_gives_mirrored_trajectory() {
        let n = 7;
        let h = build_boson_hamiltonian(n, 0.03, &Couplings::on_site(-0.2, 0.001));
        let c0: Vec<Complex64> = (0..=n).map(|l| Complex64::new(l as f64 + 1.0, 0.5 * l as f64)).collect();
        let norm = norm_sqr(&c0).sqrt();
        let c0: Vec<Complex64> = c0.into_iter().map(|z| z / norm).collect();
        let mirrored: Vec<Complex64> = c0.iter().rev().copied().collect();
        let grid = TimeGrid::spanning(400.0, 50, default_step(&h, &[], DEFAULT_STEP_FRACTION), 0.03).unwrap();
        let a = evolve(&h, &c0, &grid, "").unwrap();
        let b = evolve(&h, &mirrored, &grid, "").unwrap();
        for (x, y) in a.states.iter().zip(&b.states) {
            for l in 0..=n {
                assert!((x[l] - y[n - l]).norm() < 1e-13);
            }
        }
    }
}
