//! End-to-end stages shared by the command-line runner, the validation suite
//! and the browser demo.

use num_complex::Complex64;

use crate::couplings::{compute_couplings, derive_interaction, Couplings};
use crate::dynamics::{
    build_boson_hamiltonian, check_step, default_step, evolve_with, three_fermion_start, Backend, FermionSystem,
    Generator, PairStart, StateTrajectory, TimeGrid, DEFAULT_STEP_FRACTION,
};
use crate::eigensolver::{localize, solve_fgh, Grid, LocalizedBasis, Spectrum};
use crate::error::{DynamicsError, PipelineError};
use crate::model::{dw_potential, ModelParams};
use crate::phase::{boson_stats, build_boson_ops, build_fermion_ops, fermion_stats, PhaseStats};

/// Levels kept from the single-particle solve.
pub const N_LEVELS: usize = 4;

/// Lowest levels of the double well and the localized doublet basis.
pub fn single_particle(params: &ModelParams, grid: &Grid) -> Result<(Spectrum, LocalizedBasis), PipelineError> {
    params.validate()?;
    let v = grid.sample(|z| dw_potential(z, params));
    let spectrum = solve_fgh(&v, grid, N_LEVELS)?;
    let basis = localize(&spectrum)?;
    Ok((spectrum, basis))
}

pub fn couplings(params: &ModelParams, basis: &LocalizedBasis) -> Result<Couplings, PipelineError> {
    let ip = derive_interaction(params.r0, params.a_s)?;
    Ok(compute_couplings(basis, &ip, params.units().a_rho)?)
}

/// The start states a run can begin from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Start {
    /// Boson Fock state with `left` atoms in the left well.
    Boson {
        left: usize,
    },
    Pair(PairStart),
    /// Three fermions from `(|updown, up> + |updown, down>)/sqrt 2`.
    Triple,
}

impl Start {
    pub fn amplitudes(&self, n: usize) -> Vec<Complex64> {
        match *self {
            Start::Boson { left } => crate::phase::BosonSector { n }.fock(left),
            Start::Pair(p) => p.amplitudes(),
            Start::Triple => three_fermion_start(),
        }
    }
}

/// Everything needed to integrate one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSpec {
    pub n: usize,
    pub j: f64,
    pub couplings: Couplings,
    pub start: Start,
    pub tau_max: f64,
    pub samples: usize,
    /// Overrides the default step when set.
    pub dt: Option<f64>,
    /// RK4 steps between stored samples. When set, the sample count follows
    /// from `tau_max` instead of `samples`.
    pub stride: Option<usize>,
    pub step_fraction: f64,
    pub backend: Backend,
}

impl RunSpec {
    pub fn new(n: usize, j: f64, couplings: Couplings, start: Start) -> Self {
        RunSpec {
            n,
            j,
            couplings,
            start,
            tau_max: 40.0,
            samples: 2000,
            dt: None,
            stride: None,
            step_fraction: DEFAULT_STEP_FRACTION,
            backend: Backend::Rk4,
        }
    }
}

pub fn time_grid(spec: &RunSpec, h: &impl Generator) -> Result<TimeGrid, DynamicsError> {
    if !(spec.j > 0.0) {
        return Err(DynamicsError::InvalidTimes(format!("tau = J t needs J > 0, got {}", spec.j)));
    }
    if !(spec.tau_max > 0.0 && spec.tau_max.is_finite()) {
        return Err(DynamicsError::InvalidTimes(format!("tau_max must be positive, got {}", spec.tau_max)));
    }
    let c = spec.couplings;
    let dt = spec.dt.unwrap_or_else(|| default_step(h, &[spec.j, c.u0(), c.u_lr], spec.step_fraction));
    let t_max = spec.tau_max / spec.j;
    match spec.stride {
        Some(stride) => {
            let grid = TimeGrid::new(dt, stride, 1, spec.j)?;
            let samples = (t_max / (dt * stride as f64)).floor() as usize + 1;
            Ok(TimeGrid { samples, ..grid })
        }
        None => TimeGrid::spanning(t_max, spec.samples, dt, spec.j),
    }
}

/// Time grid a run will use, with the RK4 step precondition checked up front.
pub fn time_grid_for(spec: &RunSpec) -> Result<TimeGrid, DynamicsError> {
    fn checked(spec: &RunSpec, h: &impl Generator) -> Result<TimeGrid, DynamicsError> {
        let grid = time_grid(spec, h)?;
        if spec.backend == Backend::Rk4 {
            check_step(h, grid.dt)?;
        }
        Ok(grid)
    }
    match spec.start {
        Start::Boson { .. } => checked(spec, &build_boson_hamiltonian(spec.n, spec.j, &spec.couplings)),
        Start::Pair(_) => checked(spec, &pair_system(spec)),
        Start::Triple => checked(spec, &triple_system(spec)),
    }
}

fn pair_system(spec: &RunSpec) -> FermionSystem {
    FermionSystem::TwoFermion { j: spec.j, u: spec.couplings.u0(), u_lr: spec.couplings.u_lr }
}

fn triple_system(spec: &RunSpec) -> FermionSystem {
    FermionSystem::ThreeFermion { j: spec.j, u: spec.couplings.u0(), u_lr: spec.couplings.u_lr }
}

/// Statistics read a normalized copy; the integrator has already bounded the
/// norm drift, and the stored amplitudes stay as integrated.
fn unit(c: &[Complex64]) -> Vec<Complex64> {
    let norm = c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    c.iter().map(|z| z / norm).collect()
}

/// Trajectory and per-sample phase statistics of one run.
pub fn run(spec: &RunSpec, label: &str) -> Result<(StateTrajectory, Vec<PhaseStats>), PipelineError> {
    let c0 = spec.start.amplitudes(spec.n);
    let j = spec.j;
    let u = spec.couplings;
    match spec.start {
        Start::Boson { .. } => {
            let h = build_boson_hamiltonian(spec.n, j, &u);
            let traj = evolve_with(spec.backend, &h, &c0, &time_grid(spec, &h)?, label)?;
            let ops = build_boson_ops(spec.n);
            let stats = traj
                .states
                .iter()
                .zip(&traj.times)
                .map(|(c, &t)| boson_stats(&unit(c), &ops).map(|s| s.at(t)))
                .collect::<Result<_, _>>()?;
            Ok((traj, stats))
        }
        Start::Pair(_) | Start::Triple => {
            let sys = if spec.start == Start::Triple { triple_system(spec) } else { pair_system(spec) };
            let traj = evolve_with(spec.backend, &sys, &c0, &time_grid(spec, &sys)?, label)?;
            let ops = build_fermion_ops(sys.n_f());
            let stats = traj
                .states
                .iter()
                .zip(&traj.times)
                .map(|(c, &t)| fermion_stats(&unit(c), &ops).map(|s| s.at(t)))
                .collect::<Result<_, _>>()?;
            Ok((traj, stats))
        }
    }
}
