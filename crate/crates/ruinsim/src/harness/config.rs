//! Experiment configuration: TOML files with [model], [sim], [run] and
//! [output] sections, plus the built-in figure presets.

use crate::estimators::{EstimatorKind, Method, Series};
use crate::model::{Load, Model, ModelError, ModelParams};
use serde::Deserialize;
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const DEFAULT_SEED: u64 = 20260810;

/// Built-in presets mirroring the published experiment designs.
pub const PRESET_NAMES: [&str; 5] = ["fig1", "fig1b", "fig2", "fig3", "fig4"];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse config: {0}")]
    Parse(String),
    #[error("invalid value for key {key}: {reason}")]
    Invalid { key: &'static str, reason: String },
    #[error("exactly one of the keys rho and lambda must be set, {found}")]
    LoadExclusivity { found: &'static str },
    #[error("invalid model: {0}")]
    Model(#[from] ModelError),
}

/// Mixture model parameters: exponential light component with rate `mu`,
/// shifted Pareto heavy component with shape `a` and scale `b`.
#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub mu: f64,
    pub a: f64,
    pub b: f64,
    pub epsilon: f64,
    #[serde(default)]
    pub rho: Option<f64>,
    #[serde(default)]
    pub lambda: Option<f64>,
}

impl ModelConfig {
    pub fn load(&self) -> Result<Load, ConfigError> {
        match (self.rho, self.lambda) {
            (Some(rho), None) => Ok(Load::TrafficIntensity(rho)),
            (None, Some(lambda)) => Ok(Load::Arrival(lambda)),
            (Some(_), Some(_)) => Err(ConfigError::LoadExclusivity {
                found: "both are present",
            }),
            (None, None) => Err(ConfigError::LoadExclusivity {
                found: "neither is present",
            }),
        }
    }

    pub fn params(&self) -> Result<ModelParams, ConfigError> {
        let load = self.load()?;
        ModelParams::exp_pareto(self.mu, self.a, self.b, self.epsilon, load).map_err(|e| match e {
            ModelError::Dist(_) => ConfigError::Invalid {
                key: "a/b/mu",
                reason: e.to_string(),
            },
            other => ConfigError::Model(other),
        })
    }

    pub fn build(&self) -> Result<Model, ConfigError> {
        let model = Model::new(self.params()?).map_err(|e| match &e {
            ModelError::NetProfit { .. } => ConfigError::Invalid {
                key: "rho",
                reason: e.to_string(),
            },
            ModelError::Epsilon(_) => ConfigError::Invalid {
                key: "epsilon",
                reason: e.to_string(),
            },
            ModelError::Arrival(_) => ConfigError::Invalid {
                key: "lambda",
                reason: e.to_string(),
            },
            _ => ConfigError::Model(e),
        })?;
        Ok(model)
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    /// Truncation order of the control variate.
    pub n: u32,
    /// Replications per (u, estimator) cell.
    pub reps: usize,
    pub seed: u64,
    pub u_grid: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub estimators: Vec<EstimatorKind>,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub path: PathBuf,
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    pub sim: SimConfig,
    pub run: RunConfig,
    pub output: OutputConfig,
}

impl ExperimentConfig {
    /// Full validation; returns the estimator list in canonical order.
    pub fn validate(&mut self) -> Result<(), ConfigError> {
        self.model.build()?;
        if self.sim.reps < 2 {
            return Err(ConfigError::Invalid {
                key: "reps",
                reason: format!("need at least 2 replications, got {}", self.sim.reps),
            });
        }
        if self.sim.u_grid.is_empty() {
            return Err(ConfigError::Invalid {
                key: "u_grid",
                reason: "must not be empty".into(),
            });
        }
        if self.sim.u_grid.iter().any(|u| !u.is_finite() || *u < 0.0) {
            return Err(ConfigError::Invalid {
                key: "u_grid",
                reason: "entries must be finite and nonnegative".into(),
            });
        }
        if self.sim.u_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ConfigError::Invalid {
                key: "u_grid",
                reason: "entries must be strictly ascending".into(),
            });
        }
        if self.run.estimators.is_empty() {
            return Err(ConfigError::Invalid {
                key: "estimators",
                reason: "must name at least one estimator".into(),
            });
        }
        if self.sim.n < 2
            && self
                .run
                .estimators
                .iter()
                .any(|k| k.method == Method::CvMax)
        {
            return Err(ConfigError::Invalid {
                key: "n",
                reason: format!("cv_max needs truncation order at least 2, got {}", self.sim.n),
            });
        }
        self.run.estimators.sort();
        self.run.estimators.dedup();
        Ok(())
    }
}

/// Parses and validates a config from TOML text.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let mut config: ExperimentConfig =
        toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    config.validate()?;
    Ok(config)
}

/// Loads and validates a config file.
pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentConfig, ConfigError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config(&text)
}

fn linear_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
        .collect()
}

fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let ratio = hi / lo;
    (0..points)
        .map(|i| lo * ratio.powf(i as f64 / (points - 1) as f64))
        .collect()
}

fn kinds(list: &[(Series, Method)]) -> Vec<EstimatorKind> {
    list.iter()
        .map(|(series, method)| EstimatorKind {
            series: *series,
            method: *method,
        })
        .collect()
}

/// Built-in experiment presets. The figure parameter sets are published; the
/// u grids are our choice: linear over [0, 10] for the bounds figure, 20
/// log-spaced points for the log-log figures, and one point per sixth of a
/// decade over [10, 10^4] for the correlation figure.
pub fn preset(name: &str) -> Option<ExperimentConfig> {
    use Method::*;
    use Series::*;
    let (model, u_grid, estimators, out) = match name {
        "fig1" => (
            ModelConfig {
                mu: 3.0,
                a: 3.0,
                b: 1.0,
                epsilon: 0.7,
                rho: Some(0.9),
                lambda: None,
            },
            linear_grid(0.0, 10.0, 21),
            kinds(&[(New, Crude)]),
            "fig1.csv",
        ),
        "fig1b" => (
            ModelConfig {
                mu: 3.0,
                a: 3.0,
                b: 1.0,
                epsilon: 0.1,
                rho: Some(0.7),
                lambda: None,
            },
            linear_grid(0.0, 10.0, 21),
            kinds(&[(New, Crude)]),
            "fig1b.csv",
        ),
        "fig2" => (
            fig2_model(),
            log_grid(1.0, 1e6, 20),
            kinds(&[(New, Crude), (New, CvMax), (Pk, Crude), (Pk, CvMax)]),
            "fig2.csv",
        ),
        "fig3" => (
            fig2_model(),
            log_grid(1.0, 1e6, 20),
            kinds(&[(New, Ak), (New, AkCv), (Pk, Ak), (Pk, AkCv)]),
            "fig3.csv",
        ),
        "fig4" => (
            fig2_model(),
            log_grid(10.0, 1e4, 19),
            kinds(&[(New, CvMax), (New, AkCv), (Pk, CvMax), (Pk, AkCv)]),
            "fig4.csv",
        ),
        _ => return None,
    };
    let mut config = ExperimentConfig {
        model,
        sim: SimConfig {
            n: 100,
            reps: 10_000,
            seed: DEFAULT_SEED,
            u_grid,
        },
        run: RunConfig { estimators },
        output: OutputConfig {
            path: PathBuf::from(out),
            format: OutputFormat::Csv,
        },
    };
    config.validate().expect("presets are valid");
    Some(config)
}

fn fig2_model() -> ModelConfig {
    ModelConfig {
        mu: 3.0,
        a: 2.0,
        b: 1.0,
        epsilon: 0.1,
        rho: Some(0.99),
        lambda: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const VALID: &str = r#"
[model]
mu = 3.0
a = 2.0
b = 1.0
epsilon = 0.1
rho = 0.99

[sim]
n = 100
reps = 10000
seed = 42
u_grid = [1.0, 10.0, 100.0]

[run]
estimators = ["new:crude", "new:cv_max"]

[output]
path = "out.csv"
format = "csv"
"#;

    #[test]
    fn parses_valid_config() {
        let c = parse_config(VALID).unwrap();
        assert_eq!(c.sim.n, 100);
        assert_eq!(c.sim.reps, 10_000);
        assert_eq!(c.run.estimators.len(), 2);
        assert_eq!(c.output.format, OutputFormat::Csv);
        c.model.build().unwrap();
    }

    #[test]
    fn net_profit_violation_names_rho() {
        let text = VALID.replace("rho = 0.99", "rho = 1.0");
        let err = parse_config(&text).unwrap_err();
        assert!(err.to_string().contains("rho"), "{err}");
    }

    #[test]
    fn exclusivity_of_rho_and_lambda() {
        let text = VALID.replace("rho = 0.99", "rho = 0.99\nlambda = 2.475");
        let err = parse_config(&text).unwrap_err();
        assert!(matches!(err, ConfigError::LoadExclusivity { .. }), "{err}");
        let text = VALID.replace("rho = 0.99", "");
        let err = parse_config(&text).unwrap_err();
        assert!(matches!(err, ConfigError::LoadExclusivity { .. }), "{err}");
    }

    #[test]
    fn missing_key_is_named() {
        let text = VALID.replace("mu = 3.0", "");
        let err = parse_config(&text).unwrap_err();
        assert!(err.to_string().contains("mu"), "{err}");
    }

    #[test]
    fn heavy_shape_at_most_one_rejected() {
        let text = VALID.replace("a = 2.0", "a = 1.0");
        let err = parse_config(&text).unwrap_err();
        assert!(err.to_string().contains('a'), "{err}");
    }

    #[test]
    fn bad_grids_rejected() {
        for (from, to) in [
            ("u_grid = [1.0, 10.0, 100.0]", "u_grid = []"),
            ("u_grid = [1.0, 10.0, 100.0]", "u_grid = [10.0, 1.0]"),
            ("u_grid = [1.0, 10.0, 100.0]", "u_grid = [1.0, 1.0]"),
            ("u_grid = [1.0, 10.0, 100.0]", "u_grid = [-1.0, 1.0]"),
        ] {
            let text = VALID.replace(from, to);
            let err = parse_config(&text).unwrap_err();
            assert!(err.to_string().contains("u_grid"), "{err}");
        }
    }

    #[test]
    fn unknown_estimator_and_unknown_key_rejected() {
        let text = VALID.replace("new:crude", "new:magic");
        assert!(parse_config(&text).is_err());
        let text = VALID.replace("seed = 42", "seed = 42\nworkers = 4");
        assert!(parse_config(&text).is_err());
    }

    #[test]
    fn estimators_canonicalized() {
        let text = VALID.replace(
            r#"estimators = ["new:crude", "new:cv_max"]"#,
            r#"estimators = ["pk:ak", "new:crude", "pk:ak", "new:crude"]"#,
        );
        let c = parse_config(&text).unwrap();
        let names: Vec<String> = c.run.estimators.iter().map(|k| k.to_string()).collect();
        assert_eq!(names, vec!["new:crude", "pk:ak"]);
    }

    #[test]
    fn presets_exist_and_validate() {
        for name in PRESET_NAMES {
            let c = preset(name).unwrap_or_else(|| panic!("missing preset {name}"));
            assert!(!c.sim.u_grid.is_empty());
            c.model.build().unwrap();
        }
        assert!(preset("fig9").is_none());
        // fig2 carries the published experiment scale.
        let fig2 = preset("fig2").unwrap();
        assert_eq!(fig2.sim.n, 100);
        assert_eq!(fig2.sim.reps, 10_000);
        assert_eq!(fig2.sim.u_grid.len(), 20);
        assert_eq!(fig2.run.estimators.len(), 4);
    }
}
