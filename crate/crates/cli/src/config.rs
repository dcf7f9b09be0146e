//! Experiment configuration: one JSON document, with dotted-path overrides.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

/// A problem with the configuration, located by its dotted field path.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self { path: path.into(), message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            write!(f, "config: {}", self.message)
        } else {
            write!(f, "config field `{}`: {}", self.path, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Decompose,
    Kam,
    Bounds,
    Evolve,
    HeisenbergFig,
    LindbladDemo,
    Verify,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::Decompose,
        Experiment::Kam,
        Experiment::Bounds,
        Experiment::Evolve,
        Experiment::HeisenbergFig,
        Experiment::LindbladDemo,
        Experiment::Verify,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Decompose => "decompose",
            Experiment::Kam => "kam",
            Experiment::Bounds => "bounds",
            Experiment::Evolve => "evolve",
            Experiment::HeisenbergFig => "heisenberg-fig",
            Experiment::LindbladDemo => "lindblad-demo",
            Experiment::Verify => "verify",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        Self::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| ConfigError::new("experiment", format!("unknown experiment `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridSpacing {
    #[default]
    Linear,
    Geometric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub t_max: f64,
    pub points: usize,
    #[serde(default)]
    pub spacing: GridSpacing,
    /// First nonzero time of a geometric grid.
    #[serde(default)]
    pub t_min: Option<f64>,
}

/// Explicit inputs for the `bounds` experiment, overriding values derived
/// from the system and perturbation.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsInput {
    pub d: Option<usize>,
    pub eta: Option<f64>,
    pub norm_v: Option<f64>,
}

/// Dephasing-qubit parameters for `lindblad-demo`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LindbladInput {
    pub omega: f64,
    pub kappa: f64,
    /// Drive strength; defaults to `kappa`.
    pub g: Option<f64>,
    /// Initial coherence vector.
    pub state: [f64; 3],
}

impl Default for LindbladInput {
    fn default() -> Self {
        Self { omega: 1.0, kappa: 1.0, g: None, state: [0.2, 0.0, 0.8] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    /// Model tag or path to a matrix JSON file.
    pub system: Option<String>,
    pub perturbation: Option<String>,
    pub observable: Option<String>,
    pub epsilon: Option<f64>,
    pub beta: Option<f64>,
    pub grid: Option<GridConfig>,
    pub seed: u64,
    pub lambda: f64,
    pub output_dir: PathBuf,
    pub bounds: Option<BoundsInput>,
    pub lindblad: Option<LindbladInput>,
}

const KNOWN_FIELDS: [&str; 13] = [
    "experiment",
    "system",
    "perturbation",
    "observable",
    "epsilon",
    "beta",
    "grid",
    "seed",
    "lambda",
    "output_dir",
    "bounds",
    "lindblad",
    "$schema",
];

pub const DEFAULT_OUTPUT_DIR: &str = "out";

fn field<T: DeserializeOwned>(obj: &Map<String, Value>, key: &str) -> Result<Option<T>, ConfigError> {
    match obj.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => serde_json::from_value(v.clone()).map(Some).map_err(|e| ConfigError::new(key, e.to_string())),
    }
}

impl ExperimentConfig {
    /// Builds and validates a configuration from a merged JSON document.
    pub fn from_value(doc: &Value) -> Result<Self, ConfigError> {
        let obj = doc.as_object().ok_or_else(|| ConfigError::new("", "top level must be a JSON object"))?;
        if let Some(k) = obj.keys().find(|k| !KNOWN_FIELDS.contains(&k.as_str())) {
            return Err(ConfigError::new(k.as_str(), "unknown field"));
        }
        let experiment: String =
            field(obj, "experiment")?.ok_or_else(|| ConfigError::new("experiment", "missing"))?;
        let cfg = Self {
            experiment: experiment.parse()?,
            system: field(obj, "system")?,
            perturbation: field(obj, "perturbation")?,
            observable: field(obj, "observable")?,
            epsilon: field(obj, "epsilon")?,
            beta: field(obj, "beta")?,
            grid: field(obj, "grid")?,
            seed: field(obj, "seed")?.unwrap_or(kamstab::verify::DEFAULT_SEED),
            lambda: field(obj, "lambda")?.unwrap_or(1.0),
            output_dir: field(obj, "output_dir")?.unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR)),
            bounds: field(obj, "bounds")?,
            lindblad: field(obj, "lindblad")?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if let Some(eps) = self.epsilon {
            if !(eps >= 0.0 && eps.is_finite()) {
                return Err(ConfigError::new("epsilon", format!("must be finite and ≥ 0, got {eps}")));
            }
        }
        if let Some(beta) = self.beta {
            if !(beta >= 0.0 && beta.is_finite()) {
                return Err(ConfigError::new("beta", format!("must be finite and ≥ 0, got {beta}")));
            }
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(ConfigError::new("lambda", format!("must be finite and ≥ 0, got {}", self.lambda)));
        }
        if let Some(g) = &self.grid {
            if g.points < 2 {
                return Err(ConfigError::new("grid.points", format!("must be ≥ 2, got {}", g.points)));
            }
            if !(g.t_max > 0.0 && g.t_max.is_finite()) {
                return Err(ConfigError::new("grid.t_max", format!("must be finite and > 0, got {}", g.t_max)));
            }
            if let Some(t_min) = g.t_min {
                if !(t_min > 0.0 && t_min < g.t_max) {
                    return Err(ConfigError::new("grid.t_min", format!("must lie in (0, t_max), got {t_min}")));
                }
            }
        }
        if let Some(l) = &self.lindblad {
            if !(l.kappa >= 0.0) {
                return Err(ConfigError::new("lindblad.kappa", "must be ≥ 0"));
            }
            if l.state.iter().map(|x| x * x).sum::<f64>() > 1.0 {
                return Err(ConfigError::new("lindblad.state", "coherence vector must have length ≤ 1"));
            }
        }
        for (key, value) in [("system", &self.system), ("perturbation", &self.perturbation), ("observable", &self.observable)] {
            if let Some(spec) = value {
                if is_matrix_path(spec) && !std::path::Path::new(spec).exists() {
                    return Err(ConfigError::new(key, format!("file `{spec}` does not exist")));
                }
            }
        }
        Ok(())
    }
}

/// Whether a model slot names a matrix file rather than a tag.
pub fn is_matrix_path(spec: &str) -> bool {
    spec.ends_with(".json") || spec.contains('/') || spec.contains(std::path::MAIN_SEPARATOR)
}

/// Parses the value half of `--set key=value`: JSON when it parses, a plain
/// string otherwise.
fn parse_override_value(raw: &str) -> Value {
    serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()))
}

/// Applies `dotted.key=value`, creating intermediate objects as needed.
pub fn apply_override(doc: &mut Value, assignment: &str) -> Result<(), ConfigError> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| ConfigError::new("", format!("override `{assignment}` is not key=value")))?;
    let path = path.trim();
    if path.is_empty() || path.split('.').any(str::is_empty) {
        return Err(ConfigError::new(path, "malformed dotted path"));
    }
    let mut node = doc;
    let keys: Vec<&str> = path.split('.').collect();
    for (i, key) in keys.iter().enumerate() {
        let here = keys[..i].join(".");
        if node.is_null() {
            *node = Value::Object(Map::new());
        }
        let obj = node
            .as_object_mut()
            .ok_or_else(|| ConfigError::new(here.clone(), "cannot set a field inside a non-object value"))?;
        if i + 1 == keys.len() {
            obj.insert((*key).to_string(), parse_override_value(raw.trim()));
            return Ok(());
        }
        node = obj.entry((*key).to_string()).or_insert(Value::Null);
    }
    unreachable!("path has at least one key")
}

/// Parses a configuration file into a JSON value, reporting line/column.
pub fn parse_config_text(text: &str) -> Result<Value, ConfigError> {
    serde_json::from_str(text)
        .map_err(|e| ConfigError::new("", format!("line {}, column {}: {e}", e.line(), e.column())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn overrides_create_nested_fields() {
        let mut doc = json!({"experiment": "kam"});
        apply_override(&mut doc, "grid.t_max=5").unwrap();
        apply_override(&mut doc, "grid.points=10").unwrap();
        apply_override(&mut doc, "system=heisenberg:N=3").unwrap();
        apply_override(&mut doc, "epsilon=0.25").unwrap();
        assert_eq!(doc["grid"], json!({"t_max": 5, "points": 10}));
        assert_eq!(doc["system"], json!("heisenberg:N=3"));
        let cfg = ExperimentConfig::from_value(&doc).unwrap();
        assert_eq!(cfg.epsilon, Some(0.25));
        assert_eq!(cfg.grid.unwrap().spacing, GridSpacing::Linear);
        assert_eq!(cfg.seed, kamstab::verify::DEFAULT_SEED);
    }

    #[test]
    fn override_into_scalar_is_rejected() {
        let mut doc = json!({"epsilon": 0.1});
        let e = apply_override(&mut doc, "epsilon.x=1").unwrap_err();
        assert_eq!(e.path, "epsilon");
        assert!(apply_override(&mut doc, "novalue").is_err());
        assert!(apply_override(&mut doc, "a..b=1").is_err());
    }

    #[test]
    fn errors_carry_field_paths() {
        let bad = |doc: Value| ExperimentConfig::from_value(&doc).unwrap_err().path;
        assert_eq!(bad(json!({"experiment": "kam", "epsilon": -1.0})), "epsilon");
        assert_eq!(bad(json!({"experiment": "kam", "grid": {"t_max": 1.0, "points": 1}})), "grid.points");
        assert_eq!(bad(json!({"experiment": "kam", "grid": {"t_max": 0.0, "points": 3}})), "grid.t_max");
        assert_eq!(bad(json!({"experiment": "nope"})), "experiment");
        assert_eq!(bad(json!({"experiment": "kam", "colour": 1})), "colour");
        assert_eq!(bad(json!({"experiment": "kam", "seed": "x"})), "seed");
        assert_eq!(bad(json!({"experiment": "kam", "system": "missing/file.json"})), "system");
        assert_eq!(bad(json!({})), "experiment");
    }

    #[test]
    fn experiment_names_round_trip() {
        for e in Experiment::ALL {
            assert_eq!(e.name().parse::<Experiment>().unwrap(), e);
            assert_eq!(serde_json::to_value(e).unwrap(), json!(e.name()));
        }
    }
}
