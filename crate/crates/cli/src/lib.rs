//! Experiment runner behind the `kamstab` binary.
//!
//! A run takes a merged [`ExperimentConfig`], writes its artifacts (CSV
//! trajectories with JSON sidecars, a `results.json`, and a
//! `manifest.json`) into the output directory, and maps failures onto exit
//! codes: 0 success, 1 computation error, 2 configuration error.

pub mod config;
mod experiments;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{json, Value};

use kamstab::io::read_matrix_file;
use kamstab::ComplexMatrix;

pub use config::{apply_override, parse_config_text, ConfigError, Experiment, ExperimentConfig, GridConfig};

#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    /// A library error, with the stage that raised it.
    Compute { context: String, source: kamstab::Error },
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Compute { .. } | CliError::Io { .. } => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "{e}"),
            CliError::Compute { context, source } => write!(f, "{context}: {source}"),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

/// Attaches experiment context to library errors.
pub(crate) trait Context<T> {
    fn context(self, what: &str) -> Result<T, CliError>;
}

impl<T> Context<T> for kamstab::Result<T> {
    fn context(self, what: &str) -> Result<T, CliError> {
        self.map_err(|source| CliError::Compute { context: what.to_string(), source })
    }
}

/// Reads a matrix file in the repository JSON schema.
pub fn parse_matrix_file(path: &Path) -> kamstab::Result<ComplexMatrix> {
    read_matrix_file(path)
}

/// Everything a finished run produced.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub output_dir: PathBuf,
    pub artifacts: Vec<String>,
    pub results: Value,
    /// False when the experiment ran but a check it performs failed
    /// (`verify` with a failing criterion).
    pub passed: bool,
    /// Lines worth echoing to the terminal.
    pub summary: Vec<String>,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }
}

/// Merges defaults, an optional config document, and `--set` overrides.
pub fn merge_config(
    experiment: Experiment,
    file: Option<Value>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    overrides: &[String],
) -> Result<(Value, ExperimentConfig), ConfigError> {
    let mut doc = file.unwrap_or_else(|| json!({}));
    if !doc.is_object() {
        return Err(ConfigError::new("", "top level must be a JSON object"));
    }
    if let Some(existing) = doc.get("experiment").and_then(Value::as_str) {
        if existing != experiment.name() {
            return Err(ConfigError::new(
                "experiment",
                format!("config says `{existing}` but the subcommand is `{experiment}`"),
            ));
        }
    }
    doc["experiment"] = json!(experiment.name());
    if let Some(seed) = seed {
        doc["seed"] = json!(seed);
    }
    if let Some(out) = out {
        doc["output_dir"] = json!(out);
    }
    for o in overrides {
        apply_override(&mut doc, o)?;
    }
    let cfg = ExperimentConfig::from_value(&doc)?;
    Ok((doc, cfg))
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

pub(crate) fn write_json(dir: &Path, name: &str, value: &Value) -> Result<(), CliError> {
    let path = dir.join(name);
    let text = serde_json::to_string_pretty(value).expect("json values serialize");
    fs::write(&path, text + "\n").map_err(io_error(&path))
}

/// Runs one experiment and writes its artifacts plus the manifest.
///
/// `echo` is the merged configuration document recorded in the manifest.
pub fn run(cfg: &ExperimentConfig, echo: &Value) -> Result<RunOutcome, CliError> {
    let dir = cfg.output_dir.clone();
    fs::create_dir_all(&dir).map_err(io_error(&dir))?;
    let mut outcome = experiments::dispatch(cfg, &dir)?;
    write_json(&dir, "results.json", &outcome.results)?;
    outcome.artifacts.push("results.json".into());
    let created = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let manifest = json!({
        "tool": "kamstab",
        "version": env!("CARGO_PKG_VERSION"),
        "experiment": cfg.experiment.name(),
        "seed": cfg.seed,
        "created_unix": created,
        "config": echo,
        "artifacts": outcome.artifacts,
        "passed": outcome.passed,
    });
    write_json(&dir, "manifest.json", &manifest)?;
    outcome.artifacts.push("manifest.json".into());
    Ok(outcome)
}
