use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use dwphase::dynamics::Backend;
use dwphase_cli::runner::{self, Manifest};
use dwphase_cli::{ExperimentConfig, Options, RunError};

#[derive(Parser)]
#[command(name = "dwphase", version, about = "Number and phase squeezing of few atoms in a double well")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON experiment config; defaults apply to every missing field.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory, overriding `output.dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[arg(long, global = true, value_enum)]
    backend: Option<BackendArg>,
}

#[derive(Subcommand)]
enum Command {
    /// Single-particle spectrum and localized basis.
    Eigen,
    /// Couplings against the interaction range.
    Couplings,
    /// One run of the base configuration.
    Evolve,
    /// One run per sweep value.
    Sweep,
    /// Invariant and anchor checks.
    Verify,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Rk4,
    Spectral,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Rk4 => Backend::Rk4,
            BackendArg::Spectral => Backend::Spectral,
        }
    }
}

fn report_runs(m: &Manifest) {
    for r in &m.runs {
        println!(
            "{}: N = {}, J = {:.6}, U0 = {:.6}, U_lr = {:.3e}, Sigma_p in [{:.4}, {:.4}], Sigma_w in [{:.4}, {:.4}]",
            r.file,
            r.n_particles,
            r.j,
            r.u0,
            r.couplings.u_lr,
            r.min_sigma_p,
            r.max_sigma_p,
            r.min_sigma_w,
            r.max_sigma_w
        );
    }
}

fn dispatch(cli: Cli) -> Result<(), RunError> {
    let config = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    let opts = Options { out: cli.out, workers: cli.workers, backend: cli.backend.map(Backend::from) };
    match cli.command {
        Command::Eigen => {
            let (spectrum, basis) = runner::eigen(config, &opts)?;
            for (k, e) in spectrum.energies.iter().enumerate() {
                println!("E{k} = {e:.8}");
            }
            println!("J = {:.8}", basis.j);
        }
        Command::Couplings => {
            let rows = runner::couplings(config, &opts)?;
            if let Some((r0, c)) = rows.iter().max_by(|a, b| a.1.u0().abs().total_cmp(&b.1.u0().abs())) {
                println!("{} ranges; max |U0| = {:.6} at r0 = {r0:.4}", rows.len(), c.u0().abs());
            }
        }
        Command::Evolve => report_runs(&runner::evolve(config, &opts)?),
        Command::Sweep => report_runs(&runner::sweep(config, &opts)?),
        Command::Verify => {
            let checks = runner::verify(config, &opts)?;
            for c in &checks {
                println!("{c}");
            }
            let failed = checks.iter().filter(|c| !c.passed).count();
            if failed > 0 {
                return Err(RunError::Validation { failed, total: checks.len() });
            }
            println!("all {} checks passed", checks.len());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
