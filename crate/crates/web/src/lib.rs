//! Entry points for the static page in `www/`. Each exported function
//! returns a JSON document the page plots directly; the plain `*_data`
//! functions behind them are what the host tests exercise.

use dwphase::dynamics::Backend;
use dwphase::pipeline::{self, RunSpec, Start};
use dwphase::validation::range_sweep;
use dwphase::{dw_potential, Grid, LocalizedBasis, ModelParams};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest boson number the page offers; the spectral propagator is dense.
pub const MAX_ATOMS: usize = 40;
pub const MAX_RANGE_POINTS: usize = 50;

#[derive(Debug, Serialize)]
pub struct SpectrumData {
    pub z: Vec<f64>,
    pub potential: Vec<f64>,
    pub psi_l: Vec<f64>,
    pub psi_r: Vec<f64>,
    pub energies: Vec<f64>,
    pub j: f64,
}

#[derive(Debug, Serialize)]
pub struct CouplingData {
    pub r0: Vec<f64>,
    pub u0: Vec<f64>,
    pub u_lr: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct SqueezingData {
    pub tau: Vec<f64>,
    pub sigma_p: Vec<f64>,
    pub sigma_w: Vec<f64>,
    pub w: Vec<f64>,
    pub u0: f64,
    pub j: f64,
}

fn trap(lambda_bar: f64, eta_bar: f64) -> ModelParams {
    ModelParams { lambda_bar, eta_bar, ..ModelParams::default() }
}

fn basis(params: &ModelParams) -> Result<LocalizedBasis, String> {
    pipeline::single_particle(params, &Grid::standard()).map(|(_, b)| b).map_err(|e| e.to_string())
}

pub fn spectrum_data(lambda_bar: f64, eta_bar: f64) -> Result<SpectrumData, String> {
    let params = trap(lambda_bar, eta_bar);
    let grid = Grid::standard();
    let (spectrum, basis) = pipeline::single_particle(&params, &grid).map_err(|e| e.to_string())?;
    Ok(SpectrumData {
        z: grid.points(),
        potential: grid.sample(|z| dw_potential(z, &params)),
        psi_l: basis.psi_l,
        psi_r: basis.psi_r,
        energies: spectrum.energies,
        j: basis.j,
    })
}

/// `U0` and `U_lr` at `points` ranges evenly covering `[0.01, 1]`.
pub fn coupling_data(points: usize) -> Result<CouplingData, String> {
    if !(2..=MAX_RANGE_POINTS).contains(&points) {
        return Err(format!("points must lie in 2..={MAX_RANGE_POINTS}, got {points}"));
    }
    let params = ModelParams::default();
    let basis = basis(&params)?;
    let mut out = CouplingData { r0: Vec::new(), u0: Vec::new(), u_lr: Vec::new() };
    for r0 in range_sweep(points) {
        let c = pipeline::couplings(&ModelParams { r0, ..params }, &basis).map_err(|e| e.to_string())?;
        out.r0.push(r0);
        out.u0.push(c.u0());
        out.u_lr.push(c.u_lr);
    }
    Ok(out)
}

/// Squeezing parameters of `n` bosons started with `left` atoms on the left.
pub fn squeezing_data(n: usize, left: usize, r0: f64, tau_max: f64, samples: usize) -> Result<SqueezingData, String> {
    if !(1..=MAX_ATOMS).contains(&n) || left > n {
        return Err(format!("need 1 <= N <= {MAX_ATOMS} and left <= N, got N = {n}, left = {left}"));
    }
    let params = ModelParams { r0, n_particles: n, ..ModelParams::default() };
    let basis = basis(&params)?;
    let couplings = pipeline::couplings(&params, &basis).map_err(|e| e.to_string())?;
    let spec = RunSpec {
        tau_max,
        samples,
        backend: Backend::Spectral,
        ..RunSpec::new(n, basis.j, couplings, Start::Boson { left })
    };
    let (traj, stats) = pipeline::run(&spec, "web").map_err(|e| e.to_string())?;
    Ok(SqueezingData {
        tau: traj.taus,
        sigma_p: stats.iter().map(|s| s.sigma_p).collect(),
        sigma_w: stats.iter().map(|s| s.sigma_w).collect(),
        w: stats.iter().map(|s| s.w).collect(),
        u0: couplings.u0(),
        j: basis.j,
    })
}

fn json<T: Serialize>(r: Result<T, String>) -> Result<String, String> {
    r.and_then(|v| serde_json::to_string(&v).map_err(|e| e.to_string()))
}

#[wasm_bindgen]
pub fn spectrum(lambda_bar: f64, eta_bar: f64) -> Result<String, String> {
    json(spectrum_data(lambda_bar, eta_bar))
}

#[wasm_bindgen]
pub fn couplings(points: usize) -> Result<String, String> {
    json(coupling_data(points))
}

#[wasm_bindgen]
pub fn squeezing(n: usize, left: usize, r0: f64, tau_max: f64, samples: usize) -> Result<String, String> {
    json(squeezing_data(n, left, r0, tau_max, samples))
}
