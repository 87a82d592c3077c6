//! Pipeline orchestration behind the subcommands.

use std::path::{Path, PathBuf};

use anyhow::Context;
use dwphase::dynamics::{tunneling_probabilities, Backend};
use dwphase::error::{DynamicsError, PipelineError};
use dwphase::pipeline::{self, RunSpec, Start};
use dwphase::validation::{self, Check};
use dwphase::{Couplings, LocalizedBasis, Species, Spectrum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::config::{ConfigError, ExperimentConfig, RunPlan, SweepParameter};
use crate::output::{self, num};

/// Command-line overrides of the config.
#[derive(Debug, Clone, Default)]
pub struct Options {
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub backend: Option<Backend>,
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{context}: {source}")]
    Pipeline { context: String, source: PipelineError },
    #[error(transparent)]
    Io(#[from] anyhow::Error),
    #[error("{failed} of {total} validation checks failed")]
    Validation { failed: usize, total: usize },
}

impl RunError {
    /// 1 for anything the config could have prevented, 2 for numerical failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Config(_) | RunError::Io(_) => 1,
            RunError::Pipeline { source, .. } => match source {
                PipelineError::Model(_)
                | PipelineError::Dynamics(DynamicsError::InvalidTimes(_) | DynamicsError::StepTooLarge(_)) => 1,
                _ => 2,
            },
            RunError::Validation { .. } => 2,
        }
    }
}

fn stage<T>(context: impl Into<String>, r: Result<T, PipelineError>) -> Result<T, RunError> {
    r.map_err(|source| RunError::Pipeline { context: context.into(), source })
}

/// Resolves the command-line overrides into the config.
pub fn resolve(mut config: ExperimentConfig, opts: &Options) -> ExperimentConfig {
    if let Some(out) = &opts.out {
        config.output.dir = out.clone();
    }
    if let Some(b) = opts.backend {
        config.backend = b;
    }
    config
}

fn in_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, RunError> {
    match workers {
        None => Ok(f()),
        Some(0) => Err(ConfigError::Invalid("--workers must be at least 1".into()).into()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build().context("cannot start worker pool")?;
            Ok(pool.install(f))
        }
    }
}

fn out_dir(config: &ExperimentConfig) -> Result<&Path, RunError> {
    let dir = config.output.dir.as_path();
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    Ok(dir)
}

fn out_path(config: &ExperimentConfig, suffix: &str) -> PathBuf {
    config.output.dir.join(format!("{}{suffix}", config.output.label))
}

/// Derived quantities and extremes of one run; also a manifest entry.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub index: usize,
    pub file: String,
    pub sweep_parameter: Option<SweepParameter>,
    pub sweep_value: Option<Value>,
    pub species: Species,
    pub n_particles: usize,
    pub initial: String,
    pub r0: f64,
    pub energies: Vec<f64>,
    pub j: f64,
    pub couplings: Couplings,
    pub u0: f64,
    pub couplings_overridden: bool,
    pub dt: f64,
    pub stride: usize,
    pub samples: usize,
    pub min_sigma_p: f64,
    pub max_sigma_p: f64,
    pub min_sigma_w: f64,
    pub max_sigma_w: f64,
    pub max_norm_drift: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub program: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    /// Fully resolved config; loading the manifest as a config repeats the runs.
    pub config: ExperimentConfig,
    pub runs: Vec<RunRecord>,
}

fn extremes(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)))
}

/// Full pipeline of one run, writing its trajectory CSV.
pub fn execute(plan: &RunPlan, dir: &Path) -> Result<RunRecord, RunError> {
    let cfg = &plan.config;
    let params = cfg.params;
    let label = format!("run {} ({})", plan.index, plan.file);
    let (spectrum, basis) = stage(&label, pipeline::single_particle(&params, &plan.grid))?;
    let (couplings, overridden) = match cfg.couplings_override() {
        Some(c) => (c, true),
        None => (stage(&label, pipeline::couplings(&params, &basis))?, false),
    };
    let t = &cfg.times;
    let spec = RunSpec {
        n: params.n_particles,
        j: basis.j,
        couplings,
        start: plan.start,
        tau_max: t.tau_max,
        samples: t.samples,
        dt: t.dt,
        stride: t.stride,
        step_fraction: t.step_fraction,
        backend: cfg.backend,
    };
    let grid = stage(&label, pipeline::time_grid_for(&spec).map_err(PipelineError::from))?;
    let (traj, stats) = stage(&label, pipeline::run(&spec, &label))?;
    // P1 and P2 are defined for two bosons started in one well
    let tunneling = match plan.start {
        Start::Boson { .. } if params.n_particles == 2 => tunneling_probabilities(&traj).ok(),
        _ => None,
    };
    output::write_trajectory(&dir.join(&plan.file), &traj, &stats, tunneling.as_ref())?;
    let (min_sigma_p, max_sigma_p) = extremes(stats.iter().map(|s| s.sigma_p));
    let (min_sigma_w, max_sigma_w) = extremes(stats.iter().map(|s| s.sigma_w));
    Ok(RunRecord {
        index: plan.index,
        file: plan.file.clone(),
        sweep_parameter: plan.sweep.as_ref().map(|(p, _)| *p),
        sweep_value: plan.sweep.as_ref().map(|(_, v)| v.clone()),
        species: params.species,
        n_particles: params.n_particles,
        initial: cfg.initial.clone().unwrap_or_default(),
        r0: params.r0,
        energies: spectrum.energies.clone(),
        j: basis.j,
        couplings,
        u0: couplings.u0(),
        couplings_overridden: overridden,
        dt: grid.dt,
        stride: grid.stride,
        samples: grid.samples,
        min_sigma_p,
        max_sigma_p,
        min_sigma_w,
        max_sigma_w,
        max_norm_drift: traj.max_norm_drift(),
    })
}

fn value_field(v: &Option<Value>) -> String {
    match v {
        None => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(Value::Number(n)) if n.is_u64() || n.is_i64() => n.to_string(),
        Some(Value::Number(n)) => num(n.as_f64().unwrap_or(f64::NAN)),
        Some(other) => other.to_string(),
    }
}

pub const SUMMARY_COLUMNS: [&str; 17] = [
    "index",
    "file",
    "parameter",
    "value",
    "species",
    "n_particles",
    "initial",
    "r0",
    "J",
    "U0",
    "U_lr",
    "U0_over_J",
    "min_Sigma_p",
    "max_Sigma_p",
    "min_Sigma_w",
    "max_Sigma_w",
    "max_norm_drift",
];

fn summary_row(r: &RunRecord) -> Vec<String> {
    vec![
        r.index.to_string(),
        r.file.clone(),
        r.sweep_parameter.map(|p| p.name().to_string()).unwrap_or_default(),
        value_field(&r.sweep_value),
        format!("{:?}", r.species).to_lowercase(),
        r.n_particles.to_string(),
        r.initial.clone(),
        num(r.r0),
        num(r.j),
        num(r.u0),
        num(r.couplings.u_lr),
        num(r.u0 / r.j),
        num(r.min_sigma_p),
        num(r.max_sigma_p),
        num(r.min_sigma_w),
        num(r.max_sigma_w),
        num(r.max_norm_drift),
    ]
}

/// Runs every plan of `config` on the worker pool and writes the per-run
/// CSVs, the summary and the manifest. Results come back in plan order
/// whatever the number of workers.
pub fn run_plans(
    config: &ExperimentConfig,
    plans: &[RunPlan],
    workers: Option<usize>,
    command: &'static str,
) -> Result<Manifest, RunError> {
    let dir = out_dir(config)?;
    let results: Vec<Result<RunRecord, RunError>> =
        in_pool(workers, || plans.par_iter().map(|p| execute(p, dir)).collect())?;
    let runs = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let rows: Vec<_> = runs.iter().map(summary_row).collect();
    output::write_table(&out_path(config, "-summary.csv"), &SUMMARY_COLUMNS, &rows)?;
    let manifest =
        Manifest { program: "dwphase", version: env!("CARGO_PKG_VERSION"), command, config: config.clone(), runs };
    output::write_json(&out_path(config, "-manifest.json"), &manifest)?;
    Ok(manifest)
}

/// The base configuration alone; a sweep block is ignored.
pub fn evolve(config: ExperimentConfig, opts: &Options) -> Result<Manifest, RunError> {
    let config = ExperimentConfig { sweep: None, ..resolve(config, opts) };
    let plans = config.plans()?;
    run_plans(&config, &plans, opts.workers, "evolve")
}

/// One run per sweep value; exactly one when the sweep block is absent or empty.
pub fn sweep(config: ExperimentConfig, opts: &Options) -> Result<Manifest, RunError> {
    let config = resolve(config, opts);
    let plans = config.plans()?;
    run_plans(&config, &plans, opts.workers, "sweep")
}

/// Number of points in the default range sweep.
pub const RANGE_SWEEP_POINTS: usize = 50;

/// On-site and inter-site couplings against the range `r0`. Uses the
/// config's `r0` sweep values if there are any, else 50 points over
/// `[0.01, 1]`.
pub fn couplings(config: ExperimentConfig, opts: &Options) -> Result<Vec<(f64, Couplings)>, RunError> {
    let config = resolve(config, opts);
    let grid = config.grid()?;
    let ranges: Vec<f64> = match &config.sweep {
        Some(s) if !s.values.is_empty() => {
            if s.parameter != SweepParameter::R0 {
                return Err(ConfigError::Invalid(format!("couplings sweeps r0, not {}", s.parameter.name())).into());
            }
            s.values
                .iter()
                .map(|v| v.as_f64().ok_or_else(|| ConfigError::Invalid(format!("r0 value {v} is not a number"))))
                .collect::<Result<_, _>>()?
        }
        _ => validation::range_sweep(RANGE_SWEEP_POINTS),
    };
    for &r0 in &ranges {
        dwphase::ModelParams { r0, ..config.params }.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
    }
    let (_, basis) = stage("single-particle solve", pipeline::single_particle(&config.params, &grid))?;
    let rows = in_pool(opts.workers, || parallel_sweep(&config.params, &basis, &ranges))?;
    let rows = stage("range sweep", rows)?;
    let dir = out_dir(&config)?;
    output::write_couplings(&dir.join(format!("{}-couplings.csv", config.output.label)), &rows)?;
    Ok(rows)
}

fn parallel_sweep(
    params: &dwphase::ModelParams,
    basis: &LocalizedBasis,
    ranges: &[f64],
) -> Result<Vec<(f64, Couplings)>, PipelineError> {
    ranges
        .par_iter()
        .map(|&r0| pipeline::couplings(&dwphase::ModelParams { r0, ..*params }, basis).map(|c| (r0, c)))
        .collect()
}

/// Spectrum and localized basis, dumped as `z, psi0, psi1, psi_l, psi_r`.
pub fn eigen(config: ExperimentConfig, opts: &Options) -> Result<(Spectrum, LocalizedBasis), RunError> {
    let config = resolve(config, opts);
    let grid = config.grid()?;
    let (spectrum, basis) = stage("single-particle solve", pipeline::single_particle(&config.params, &grid))?;
    let dir = out_dir(&config)?;
    output::write_eigen(&dir.join(format!("{}-eigen.csv", config.output.label)), &spectrum, &basis)?;
    Ok((spectrum, basis))
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    passed: bool,
    checks: &'a [Check],
}

/// The full invariant suite on the config's model and grid. A grid the
/// eigensolver refuses is reported as a failed check, not a config error.
pub fn verify(config: ExperimentConfig, opts: &Options) -> Result<Vec<Check>, RunError> {
    let config = resolve(config, opts);
    config.params.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
    let grid = dwphase::Grid::new(config.grid.half_width, config.grid.n_points);
    let params = config.params;
    let checks = in_pool(opts.workers, || {
        validation::run_all(&params, grid, |reference| {
            parallel_sweep(&params, &reference.basis, &validation::range_sweep(RANGE_SWEEP_POINTS))
        })
    })?;
    let dir = out_dir(&config)?;
    let report = VerifyReport { passed: validation::all_passed(&checks), checks: &checks };
    output::write_json(&dir.join(format!("{}-verify.json", config.output.label)), &report)?;
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_by_stage() {
        let config = RunError::Config(ConfigError::Invalid("x".into()));
        assert_eq!(config.exit_code(), 1);
        let times = RunError::Pipeline { context: "r".into(), source: DynamicsError::StepTooLarge(0.2).into() };
        assert_eq!(times.exit_code(), 1);
        let drift = RunError::Pipeline { context: "r".into(), source: DynamicsError::NormDriftExceeded(1e-8).into() };
        assert_eq!(drift.exit_code(), 2);
        assert_eq!(RunError::Validation { failed: 1, total: 3 }.exit_code(), 2);
    }

    #[test]
    fn value_fields() {
        assert_eq!(value_field(&None), "");
        assert_eq!(value_field(&Some(serde_json::json!(4))), "4");
        assert_eq!(value_field(&Some(serde_json::json!(0.5))), "5.00000000000e-1");
        assert_eq!(value_field(&Some(serde_json::json!("singlet"))), "singlet");
    }
}
