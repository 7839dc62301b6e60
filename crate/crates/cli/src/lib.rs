//! Library side of the `quatfol` command: resolve a scenario, analyse it and
//! render the report. Kept separate from `main` so tests can drive runs
//! without spawning processes.

use std::fmt;
use std::path::Path;

use quatfol_core::scenarios::{builtin, builtin_names, family, parse_scenario};
use quatfol_core::theorems::{verify, AnalysisConfig, VerificationReport};
use quatfol_core::{FdConfig, ScenarioSpec};

/// Report rendering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Machine,
}

/// Everything that determines a run; equal configs give identical output.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Builtin scenario name or path to a scenario file.
    pub scenario: String,
    pub tol: Option<f64>,
    pub fd_step: Option<f64>,
    /// Grid points per chart axis.
    pub samples: Option<usize>,
    pub format: Format,
    pub seed: u64,
}

impl RunConfig {
    pub fn new(scenario: impl Into<String>) -> Self {
        RunConfig {
            scenario: scenario.into(),
            tol: None,
            fd_step: None,
            samples: None,
            format: Format::Text,
            seed: 0,
        }
    }
}

/// Exit status of a run.
pub mod exit {
    pub const OK: i32 = 0;
    pub const CONFIG: i32 = 1;
    pub const FAILED: i32 = 2;
    pub const INCONCLUSIVE: i32 = 3;
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

/// Outcome of [`run`]: the rendered report (or error message) and the exit code.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: Option<VerificationReport>,
    pub output: String,
    pub exit_code: i32,
}

impl RunOutcome {
    fn config_error(e: ConfigError) -> Self {
        RunOutcome {
            report: None,
            output: format!("configuration error: {e}\n"),
            exit_code: exit::CONFIG,
        }
    }
}

/// Builtin name first, then a file path.
pub fn resolve_scenario(source: &str) -> Result<ScenarioSpec, ConfigError> {
    if let Some(spec) = builtin(source) {
        return Ok(spec);
    }
    let path = Path::new(source);
    if !path.exists() {
        return Err(ConfigError(format!(
            "'{source}' is neither a builtin scenario ({}) nor an existing file",
            builtin_names().join(", ")
        )));
    }
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("cannot read {source}: {e}")))?;
    parse_scenario(&text).map_err(|e| ConfigError(format!("{source}: {e}")))
}

fn positive(name: &str, v: Option<f64>) -> Result<(), ConfigError> {
    match v {
        Some(x) if !(x.is_finite() && x > 0.0) => {
            Err(ConfigError(format!("{name} must be positive and finite, got {x}")))
        }
        _ => Ok(()),
    }
}

/// Analysis settings for a scenario with the run's overrides applied.
pub fn analysis_config(spec: &ScenarioSpec, config: &RunConfig) -> Result<AnalysisConfig, ConfigError> {
    positive("--tol", config.tol)?;
    positive("--fd-step", config.fd_step)?;
    if config.samples == Some(0) {
        return Err(ConfigError("--samples must be at least 1".into()));
    }
    let mut cfg = spec.analysis_config(AnalysisConfig::default());
    if let Some(t) = config.tol {
        cfg.tol = t;
    }
    if let Some(h) = config.fd_step {
        cfg.fd = FdConfig::with_base_step(h);
    }
    cfg.seed = config.seed;
    Ok(cfg)
}

/// Resolves, analyses and verifies a scenario.
pub fn run(config: &RunConfig) -> RunOutcome {
    let mut spec = match resolve_scenario(&config.scenario) {
        Ok(s) => s,
        Err(e) => return RunOutcome::config_error(e),
    };
    let cfg = match analysis_config(&spec, config) {
        Ok(c) => c,
        Err(e) => return RunOutcome::config_error(e),
    };
    if let Some(n) = config.samples {
        spec = spec.with_samples_per_axis(n);
    }
    let report = match spec.analyse(cfg) {
        Ok(analysis) => match verify(&analysis, spec.declared_ranks) {
            Ok(r) => r,
            Err(e) => return RunOutcome::config_error(ConfigError(format!("evaluation failed: {e}"))),
        },
        Err(e) => match VerificationReport::not_cr(&spec.name, spec.declared_ranks, &e) {
            Some(r) => r,
            None => return RunOutcome::config_error(ConfigError(e.to_string())),
        },
    };
    let output = match config.format {
        Format::Text => report.to_text(),
        Format::Machine => report.to_machine(),
    };
    RunOutcome {
        exit_code: report.exit_code(),
        report: Some(report),
        output,
    }
}

/// One line per builtin: name, ambient dimension and a summary.
pub fn list_scenarios() -> String {
    let mut out = String::new();
    for name in builtin_names() {
        let fam = family(name).expect("listed builtin exists");
        out.push_str(&format!("{name:<20} H^{}  {}\n", fam.m, fam.summary));
    }
    out
}
