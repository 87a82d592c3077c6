//! Experiment definitions read from JSON.

use std::path::{Path, PathBuf};

use dwphase::dynamics::{Backend, PairStart};
use dwphase::pipeline::Start;
use dwphase::{Couplings, Grid, ModelParams, Species};
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot parse {path}: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },
    #[error("invalid config: {0}")]
    Invalid(String),
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub half_width: f64,
    pub n_points: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        let g = Grid::standard();
        GridConfig { half_width: g.z_max(), n_points: g.n_points() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimeConfig {
    /// End of the run in `tau = J t`.
    pub tau_max: f64,
    /// Stored samples, including `tau = 0`. Ignored when `stride` is set.
    pub samples: usize,
    /// RK4 step in units of `1 / omega_z`; chosen from the energy scales if absent.
    pub dt: Option<f64>,
    /// RK4 steps per stored sample.
    pub stride: Option<usize>,
    pub step_fraction: f64,
}

impl Default for TimeConfig {
    fn default() -> Self {
        TimeConfig {
            tau_max: 40.0,
            samples: 2000,
            dt: None,
            stride: None,
            step_fraction: dwphase::dynamics::DEFAULT_STEP_FRACTION,
        }
    }
}

/// Parameters a sweep can vary. Everything except `initial` is a field of
/// the model parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    R0,
    NParticles,
    AS,
    LambdaBar,
    EtaBar,
    OmegaRhoRatio,
    Initial,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::R0 => "r0",
            SweepParameter::NParticles => "n_particles",
            SweepParameter::AS => "a_s",
            SweepParameter::LambdaBar => "lambda_bar",
            SweepParameter::EtaBar => "eta_bar",
            SweepParameter::OmegaRhoRatio => "omega_rho_ratio",
            SweepParameter::Initial => "initial",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub parameter: SweepParameter,
    #[serde(default)]
    pub values: Vec<Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub label: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: PathBuf::from("out"), label: "run".into() }
    }
}

/// Fixed coupling values used instead of the computed integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingsOverride {
    pub u0: f64,
    pub u_lr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub params: ModelParams,
    pub grid: GridConfig,
    /// Boson split `"left:right"` (tokens `N`, `N/2` or integers), or one of
    /// `singlet`, `double-left` (two fermions) and `three-fermion`.
    pub initial: Option<String>,
    pub times: TimeConfig,
    pub sweep: Option<SweepConfig>,
    pub output: OutputConfig,
    pub couplings_override: Option<CouplingsOverride>,
    pub backend: Backend,
}

/// A manifest carries the resolved config next to the derived results, so
/// it can be fed back in as a config.
#[derive(Deserialize)]
struct ManifestShape {
    config: ExperimentConfig,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.into(), source })?;
        Self::parse(&text).map_err(|source| ConfigError::Parse { path: path.into(), source })
    }

    pub fn parse(text: &str) -> Result<Self, serde_json::Error> {
        let value: Value = serde_json::from_str(text)?;
        if value.get("config").is_some() && value.get("runs").is_some() {
            Ok(serde_json::from_value::<ManifestShape>(value)?.config)
        } else {
            serde_json::from_value(value)
        }
    }

    pub fn grid(&self) -> Result<Grid, ConfigError> {
        Grid::new(self.grid.half_width, self.grid.n_points).map_err(|e| invalid(format!("grid: {e}")))
    }

    pub fn couplings_override(&self) -> Option<Couplings> {
        self.couplings_override.map(|c| Couplings::on_site(c.u0, c.u_lr))
    }

    fn check_times(&self) -> Result<(), ConfigError> {
        let t = &self.times;
        if !(t.tau_max > 0.0 && t.tau_max.is_finite()) {
            return Err(invalid(format!("times.tau_max must be positive, got {}", t.tau_max)));
        }
        if t.stride.is_none() && t.samples < 2 {
            return Err(invalid(format!("times.samples must be at least 2, got {}", t.samples)));
        }
        if let Some(dt) = t.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(invalid(format!("times.dt must be positive, got {dt}")));
            }
        }
        match t.stride {
            Some(0) => return Err(invalid("times.stride must be positive")),
            Some(_) if t.dt.is_none() => return Err(invalid("times.stride needs an explicit times.dt")),
            _ => {}
        }
        if !(t.step_fraction > 0.0 && t.step_fraction.is_finite()) {
            return Err(invalid(format!("times.step_fraction must be positive, got {}", t.step_fraction)));
        }
        Ok(())
    }

    /// One resolved, validated configuration per run, in sweep order.
    pub fn plans(&self) -> Result<Vec<RunPlan>, ConfigError> {
        self.check_times()?;
        let grid = self.grid()?;
        if self.output.label.is_empty() || self.output.label.contains(['/', '\\']) {
            return Err(invalid(format!("output.label `{}` must be a plain file stem", self.output.label)));
        }
        let values = match &self.sweep {
            Some(s) if !s.values.is_empty() => s.values.iter().map(|v| Some((s.parameter, v.clone()))).collect(),
            _ => vec![None],
        };
        let single = values.len() == 1;
        values
            .into_iter()
            .enumerate()
            .map(|(index, sweep)| {
                let mut run = self.clone();
                run.sweep = None;
                if let Some((p, v)) = &sweep {
                    run.apply(*p, v)?;
                }
                run.params.validate().map_err(|e| invalid(context(&sweep, e)))?;
                let initial = run.initial.clone().unwrap_or_else(|| default_initial(&run.params).into());
                let start = parse_initial(&initial, &run.params).map_err(|e| invalid(context(&sweep, e)))?;
                let file = if single {
                    format!("{}.csv", self.output.label)
                } else {
                    format!("{}-{index:03}.csv", self.output.label)
                };
                run.initial = Some(initial);
                Ok(RunPlan { index, file, sweep, config: run, grid: grid.clone(), start })
            })
            .collect()
    }

    fn apply(&mut self, parameter: SweepParameter, value: &Value) -> Result<(), ConfigError> {
        if parameter == SweepParameter::Initial {
            let s =
                value.as_str().ok_or_else(|| invalid(format!("sweep value {value} for initial must be a string")))?;
            self.initial = Some(s.into());
            return Ok(());
        }
        let mut params = serde_json::to_value(self.params).expect("parameters serialize");
        params[parameter.name()] = value.clone();
        self.params = serde_json::from_value(params)
            .map_err(|e| invalid(format!("sweep value {value} for {}: {e}", parameter.name())))?;
        Ok(())
    }
}

fn context(sweep: &Option<(SweepParameter, Value)>, e: impl std::fmt::Display) -> String {
    match sweep {
        Some((p, v)) => format!("{} = {v}: {e}", p.name()),
        None => e.to_string(),
    }
}

fn default_initial(params: &ModelParams) -> &'static str {
    match (params.species, params.n_particles) {
        (Species::Fermion, 3) => "three-fermion",
        (Species::Fermion, _) => "double-left",
        (Species::Boson, _) => "N:0",
    }
}

/// Parses a boson occupation split or a named fermion start.
pub fn parse_initial(text: &str, params: &ModelParams) -> Result<Start, String> {
    let n = params.n_particles;
    match (params.species, text) {
        (Species::Fermion, "singlet") if n == 2 => Ok(Start::Pair(PairStart::Singlet)),
        (Species::Fermion, "double-left") if n == 2 => Ok(Start::Pair(PairStart::DoubleLeft)),
        (Species::Fermion, "three-fermion") if n == 3 => Ok(Start::Triple),
        (Species::Fermion, other) => Err(format!(
            "unknown start `{other}` for {n} fermions; expected {}",
            if n == 3 { "three-fermion" } else { "singlet or double-left" }
        )),
        (Species::Boson, split) => {
            let (l, r) =
                split.split_once(':').ok_or_else(|| format!("boson start `{split}` is not of the form left:right"))?;
            let (l, r) = (occupancy(l, n)?, occupancy(r, n)?);
            if l + r != n {
                return Err(format!("boson start `{split}` holds {} atoms, not {n}", l + r));
            }
            Ok(Start::Boson { left: l })
        }
    }
}

fn occupancy(token: &str, n: usize) -> Result<usize, String> {
    match token.trim() {
        "N" => Ok(n),
        "N/2" if n.is_multiple_of(2) => Ok(n / 2),
        "N/2" => Err(format!("N/2 needs an even atom number, got {n}")),
        t => t.parse().map_err(|_| format!("bad occupancy `{t}`")),
    }
}

/// A single run resolved from a config and, possibly, one sweep value.
#[derive(Debug, Clone)]
pub struct RunPlan {
    pub index: usize,
    pub file: String,
    pub sweep: Option<(SweepParameter, Value)>,
    /// The run's own config, sweep applied and initial condition filled in.
    pub config: ExperimentConfig,
    pub grid: Grid,
    pub start: Start,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn boson(n: usize) -> ModelParams {
        ModelParams { n_particles: n, ..ModelParams::default() }
    }

    #[test]
    fn boson_splits() {
        assert_eq!(parse_initial("N:0", &boson(4)), Ok(Start::Boson { left: 4 }));
        assert_eq!(parse_initial("0:N", &boson(4)), Ok(Start::Boson { left: 0 }));
        assert_eq!(parse_initial("N/2:N/2", &boson(4)), Ok(Start::Boson { left: 2 }));
        assert_eq!(parse_initial("3:1", &boson(4)), Ok(Start::Boson { left: 3 }));
        assert!(parse_initial("N/2:N/2", &boson(3)).is_err());
        assert!(parse_initial("2:1", &boson(4)).is_err());
        assert!(parse_initial("singlet", &boson(2)).is_err());
    }

    #[test]
    fn fermion_names_follow_particle_number() {
        let pair = ModelParams { species: Species::Fermion, ..ModelParams::default() };
        assert_eq!(parse_initial("singlet", &pair), Ok(Start::Pair(PairStart::Singlet)));
        assert!(parse_initial("three-fermion", &pair).is_err());
        let triple = ModelParams { n_particles: 3, ..pair };
        assert_eq!(parse_initial("three-fermion", &triple), Ok(Start::Triple));
        assert!(parse_initial("1:1", &triple).is_err());
    }

    #[test]
    fn empty_config_is_default() {
        let c = ExperimentConfig::parse("{}").unwrap();
        assert_eq!(c, ExperimentConfig::default());
        let plans = c.plans().unwrap();
        assert_eq!(plans.len(), 1);
        assert_eq!(plans[0].file, "run.csv");
        assert_eq!(plans[0].start, Start::Boson { left: 2 });
    }

    #[test]
    fn empty_sweep_is_one_run() {
        let c = ExperimentConfig::parse(r#"{"sweep": {"parameter": "r0", "values": []}}"#).unwrap();
        assert_eq!(c.plans().unwrap().len(), 1);
    }

    #[test]
    fn sweep_resolves_each_value() {
        let c = ExperimentConfig::parse(
            r#"{"initial": "N:0", "sweep": {"parameter": "n_particles", "values": [2, 4, 6]}}"#,
        )
        .unwrap();
        let plans = c.plans().unwrap();
        let lefts: Vec<_> = plans.iter().map(|p| p.start).collect();
        assert_eq!(lefts, [2, 4, 6].map(|left| Start::Boson { left }));
        assert_eq!(plans[2].file, "run-002.csv");
        assert_eq!(plans[1].config.params.n_particles, 4);
    }

    #[test]
    fn rejects_bad_input() {
        for text in [
            r#"{"params": {"r0": -1}}"#,
            r#"{"grid": {"n_points": 65}}"#,
            r#"{"times": {"stride": 10}}"#,
            r#"{"times": {"tau_max": 0}}"#,
            r#"{"sweep": {"parameter": "r0", "values": [0.1, -0.2]}}"#,
            r#"{"sweep": {"parameter": "a_s", "values": ["sideways"]}}"#,
            r#"{"params": {"species": "fermion", "n_particles": 4}}"#,
            r#"{"output": {"label": "a/b"}}"#,
        ] {
            let c = ExperimentConfig::parse(text).unwrap();
            assert!(matches!(c.plans(), Err(ConfigError::Invalid(_))), "{text}");
        }
        assert!(ExperimentConfig::parse(r#"{"parms": {}}"#).is_err());
    }

    proptest::proptest! {
        #[test]
        fn splits_parse_to_left_count(n in 1usize..60, frac in 0.0f64..=1.0) {
            let left = ((n as f64) * frac).round() as usize;
            let text = format!("{}:{}", left, n - left);
            proptest::prop_assert_eq!(parse_initial(&text, &boson(n)), Ok(Start::Boson { left }));
            let overfull = format!("{}:{}", left, n - left + 1);
            proptest::prop_assert!(parse_initial(&overfull, &boson(n)).is_err());
        }
    }

    #[test]
    fn manifest_round_trips_as_config() {
        let c = ExperimentConfig { initial: Some("1:1".into()), ..ExperimentConfig::default() };
        let manifest = serde_json::json!({ "config": c, "runs": [] });
        assert_eq!(ExperimentConfig::parse(&manifest.to_string()).unwrap(), c);
    }
}
