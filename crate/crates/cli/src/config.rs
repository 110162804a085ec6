//! Experiment configuration: the JSON schema and its resolution into core
//! model specs.
//!
//! A config names either real input CSVs (`inputs`) or a synthetic
//! generator block (`synthetic`), never both. Unknown fields are rejected
//! so typos fail loudly.

use std::fs;
use std::path::{Path, PathBuf};

use peakcast_core::models::{AnnSpec, Kernel, RegressorSpec, SvrParams, WeightMode};
use peakcast_core::selection::BicForm;
use peakcast_core::PredictorSet;
use serde::{Deserialize, Serialize};

use crate::error::PipelineError;
use crate::time::Date;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub inputs: Option<InputPaths>,
    #[serde(default)]
    pub synthetic: Option<SynthConfig>,
    /// Predictor subset used for training, e.g. "SDRT" or "DRT".
    #[serde(default = "default_predictors")]
    pub predictors: PredictorSet,
    #[serde(default = "default_models")]
    pub models: Vec<ModelConfig>,
    #[serde(default)]
    pub bootstrap: BootstrapConfig,
    #[serde(default)]
    pub bic_form: BicForm,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    /// Fraction of samples (most recent dates) held out for evaluation;
    /// 0 evaluates in-sample.
    #[serde(default)]
    pub holdout_fraction: f64,
}

fn default_predictors() -> PredictorSet {
    PredictorSet::FULL
}

fn default_models() -> Vec<ModelConfig> {
    vec![
        ModelConfig::Mlr,
        ModelConfig::Qr { tau: default_tau() },
        ModelConfig::Svr {
            c: default_c(),
            epsilon: default_epsilon(),
            kernel: KernelConfig::Linear,
            tol: default_svr_tol(),
            max_iter: default_svr_max_iter(),
        },
        ModelConfig::Ann {
            hidden_neurons: default_hidden(),
            max_epochs: default_epochs(),
            seed: None,
        },
        ModelConfig::Ens { members: None, weights: WeightMode::Equal },
    ]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputPaths {
    pub observed_csv: PathBuf,
    pub forecast_csv: PathBuf,
    pub energy_csv: PathBuf,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BootstrapConfig {
    #[serde(default = "default_b")]
    pub b: u32,
    #[serde(default)]
    pub seed: u64,
}

fn default_b() -> u32 {
    2500
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig { b: default_b(), seed: 0 }
    }
}

/// Per-variable shift of the synthetic forecasts, expressed as the
/// expected value of observed − forecast (the reported Bias).
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariableBias {
    #[serde(default)]
    pub sky_cover: f64,
    #[serde(default)]
    pub dew_point: f64,
    #[serde(default)]
    pub rel_humidity: f64,
    #[serde(default)]
    pub temperature: f64,
}

/// Ground-truth affine map from the four predictors to the daily peak.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeakCoefficients {
    pub intercept: f64,
    pub sky_cover: f64,
    pub dew_point: f64,
    pub rel_humidity: f64,
    pub temperature: f64,
}

impl Default for PeakCoefficients {
    fn default() -> Self {
        // keeps the peak positive over the generator's value ranges
        PeakCoefficients {
            intercept: 60.0,
            sky_cover: -0.35,
            dew_point: 0.10,
            rel_humidity: -0.05,
            temperature: 0.40,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthConfig {
    pub days: usize,
    #[serde(default)]
    pub seed: u64,
    /// Forecast noise standard deviation per horizon, 6 entries.
    #[serde(default = "default_noise")]
    pub noise_std: Vec<f64>,
    #[serde(default)]
    pub bias: VariableBias,
    #[serde(default)]
    pub coefficients: PeakCoefficients,
    /// Standard deviation of the noise added to the daily peak itself.
    #[serde(default)]
    pub target_noise_std: f64,
    #[serde(default = "default_start")]
    pub start: Date,
}

fn default_noise() -> Vec<f64> {
    vec![0.0; 6]
}

fn default_start() -> Date {
    Date::new(2016, 5, 1).expect("valid constant")
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelConfig {
    #[default]
    Linear,
    Rbf {
        /// Defaults to 1/k for k selected predictors.
        gamma: Option<f64>,
    },
}

impl KernelConfig {
    fn resolve(self, n_predictors: usize) -> Kernel {
        match self {
            KernelConfig::Linear => Kernel::Linear,
            KernelConfig::Rbf { gamma: Some(g) } => Kernel::Rbf { gamma: g },
            KernelConfig::Rbf { gamma: None } => Kernel::rbf_with_default_gamma(n_predictors),
        }
    }
}

fn default_tau() -> f64 {
    0.5
}

fn default_c() -> f64 {
    1.0
}

fn default_epsilon() -> f64 {
    0.1
}

fn default_svr_tol() -> f64 {
    1e-3
}

fn default_svr_max_iter() -> usize {
    1_000_000
}

fn default_hidden() -> usize {
    10
}

fn default_epochs() -> usize {
    100
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelConfig {
    Mlr,
    Qr {
        #[serde(default = "default_tau")]
        tau: f64,
    },
    Svr {
        #[serde(default = "default_c")]
        c: f64,
        #[serde(default = "default_epsilon")]
        epsilon: f64,
        #[serde(default)]
        kernel: KernelConfig,
        #[serde(default = "default_svr_tol")]
        tol: f64,
        #[serde(default = "default_svr_max_iter")]
        max_iter: usize,
    },
    Ann {
        #[serde(default = "default_hidden")]
        hidden_neurons: usize,
        #[serde(default = "default_epochs")]
        max_epochs: usize,
        /// Defaults to 0 when absent.
        #[serde(default)]
        seed: Option<u64>,
    },
    /// Weighted average of member models; defaults to all four base kinds.
    Ens {
        #[serde(default)]
        members: Option<Vec<ModelConfig>>,
        #[serde(default = "default_weight_mode")]
        weights: WeightMode,
    },
}

fn default_weight_mode() -> WeightMode {
    WeightMode::Equal
}

fn default_ens_members() -> Vec<ModelConfig> {
    vec![
        ModelConfig::Mlr,
        ModelConfig::Qr { tau: default_tau() },
        ModelConfig::Svr {
            c: default_c(),
            epsilon: default_epsilon(),
            kernel: KernelConfig::Linear,
            tol: default_svr_tol(),
            max_iter: default_svr_max_iter(),
        },
        ModelConfig::Ann {
            hidden_neurons: default_hidden(),
            max_epochs: default_epochs(),
            seed: None,
        },
    ]
}

impl ModelConfig {
    /// Concrete core spec for a design with `n_predictors` columns.
    pub fn resolve(&self, n_predictors: usize) -> RegressorSpec {
        match self {
            ModelConfig::Mlr => RegressorSpec::Mlr,
            ModelConfig::Qr { tau } => RegressorSpec::Qr { tau: *tau },
            ModelConfig::Svr { c, epsilon, kernel, tol, max_iter } => {
                RegressorSpec::Svr(SvrParams {
                    c: *c,
                    epsilon: *epsilon,
                    kernel: kernel.resolve(n_predictors),
                    tol: *tol,
                    max_iter: *max_iter,
                })
            }
            ModelConfig::Ann { hidden_neurons, max_epochs, seed } => {
                RegressorSpec::Ann(AnnSpec {
                    hidden_neurons: *hidden_neurons,
                    max_epochs: *max_epochs,
                    seed: seed.unwrap_or(0),
                })
            }
            ModelConfig::Ens { members, weights } => {
                let members = members.clone().unwrap_or_else(default_ens_members);
                RegressorSpec::Ensemble {
                    members: members.iter().map(|m| m.resolve(n_predictors)).collect(),
                    weights: *weights,
                }
            }
        }
    }

    /// Label used in reports and for model file stems.
    pub fn kind_label(&self) -> &'static str {
        match self {
            ModelConfig::Mlr => "MLR",
            ModelConfig::Qr { .. } => "QR",
            ModelConfig::Svr { .. } => "SVR",
            ModelConfig::Ann { .. } => "ANN",
            ModelConfig::Ens { .. } => "ENS",
        }
    }

    fn force_seed(&mut self, seed: u64) {
        match self {
            ModelConfig::Ann { seed: s, .. } => *s = Some(seed),
            ModelConfig::Ens { members, .. } => {
                for member in members.get_or_insert_with(default_ens_members) {
                    member.force_seed(seed);
                }
            }
            _ => {}
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let content = fs::read_to_string(path)
            .map_err(|source| PipelineError::Io { path: path.to_path_buf(), source })?;
        let config: ExperimentConfig = serde_json::from_str(&content)
            .map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        match (&self.inputs, &self.synthetic) {
            (Some(_), Some(_)) => {
                return Err(PipelineError::Config(
                    "provide either `inputs` or `synthetic`, not both".into(),
                ))
            }
            (None, None) => {
                return Err(PipelineError::Config(
                    "provide one of `inputs` or `synthetic`".into(),
                ))
            }
            _ => {}
        }
        if self.models.is_empty() {
            return Err(PipelineError::Config("`models` must not be empty".into()));
        }
        if !(0.0..=0.9).contains(&self.holdout_fraction) {
            return Err(PipelineError::Config(
                "`holdout_fraction` must lie in [0, 0.9]".into(),
            ));
        }
        if let Some(synth) = &self.synthetic {
            if synth.days == 0 {
                return Err(PipelineError::Config("`synthetic.days` must be positive".into()));
            }
            if synth.noise_std.len() != 6 {
                return Err(PipelineError::Config(
                    "`synthetic.noise_std` needs exactly 6 entries (horizons 1..6)".into(),
                ));
            }
            if synth.noise_std.iter().any(|s| *s < 0.0 || !s.is_finite()) {
                return Err(PipelineError::Config(
                    "`synthetic.noise_std` entries must be finite and >= 0".into(),
                ));
            }
        }
        Ok(())
    }

    /// Apply command-line overrides. A `--seed` forces every seeded
    /// component: the generator, the bootstrap, and all ANN models.
    pub fn apply_overrides(
        &mut self,
        seed: Option<u64>,
        out: Option<PathBuf>,
        bic_form: Option<BicForm>,
    ) {
        if let Some(seed) = seed {
            self.bootstrap.seed = seed;
            if let Some(synth) = &mut self.synthetic {
                synth.seed = seed;
            }
            for model in &mut self.models {
                model.force_seed(seed);
            }
        }
        if let Some(out) = out {
            self.output_dir = Some(out);
        }
        if let Some(form) = bic_form {
            self.bic_form = form;
        }
    }

    /// The output directory, which must come from the config or `--out`.
    pub fn output_dir(&self) -> Result<&Path, PipelineError> {
        self.output_dir
            .as_deref()
            .ok_or_else(|| PipelineError::Config("no output directory (set `output_dir` or pass --out)".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_synthetic_config_fills_defaults() {
        let json = r#"{ "synthetic": { "days": 30 } }"#;
        let config: ExperimentConfig = serde_json::from_str(json).unwrap();
        config.validate().unwrap();
        assert_eq!(config.predictors, PredictorSet::FULL);
        assert_eq!(config.models.len(), 5);
        assert_eq!(config.bootstrap.b, 2500);
        assert_eq!(config.bic_form, BicForm::Printed);
        assert_eq!(config.holdout_fraction, 0.0);
        let synth = config.synthetic.unwrap();
        assert_eq!(synth.noise_std, vec![0.0; 6]);
        assert_eq!(synth.start, Date::new(2016, 5, 1).unwrap());
    }

    #[test]
    fn rejects_both_or_neither_input_blocks() {
        let neither: ExperimentConfig = serde_json::from_str("{}").unwrap();
        assert!(neither.validate().is_err());
        let both: ExperimentConfig = serde_json::from_str(
            r#"{
                "inputs": {"observed_csv": "o.csv", "forecast_csv": "f.csv", "energy_csv": "e.csv"},
                "synthetic": {"days": 3}
            }"#,
        )
        .unwrap();
        assert!(both.validate().is_err());
    }

    #[test]
    fn rejects_unknown_fields_and_bad_noise() {
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"daze": 1}"#).is_err());
        let bad_noise: ExperimentConfig = serde_json::from_str(
            r#"{ "synthetic": { "days": 3, "noise_std": [1.0, 2.0] } }"#,
        )
        .unwrap();
        assert!(bad_noise.validate().is_err());
    }

    #[test]
    fn model_specs_resolve_with_defaults() {
        let json = r#"{
            "synthetic": { "days": 30 },
            "models": [
                {"kind": "qr"},
                {"kind": "svr", "kernel": {"rbf": {}}},
                {"kind": "ann", "seed": 9},
                {"kind": "ens", "weights": "optimized"}
            ]
        }"#;
        let config: ExperimentConfig = serde_json::from_str(json).unwrap();
        let specs: Vec<RegressorSpec> =
            config.models.iter().map(|m| m.resolve(4)).collect();
        assert_eq!(specs[0], RegressorSpec::Qr { tau: 0.5 });
        let RegressorSpec::Svr(params) = &specs[1] else { panic!() };
        assert_eq!(params.kernel, Kernel::Rbf { gamma: 0.25 });
        assert_eq!(params.c, 1.0);
        assert_eq!(params.epsilon, 0.1);
        let RegressorSpec::Ann(ann) = &specs[2] else { panic!() };
        assert_eq!((ann.hidden_neurons, ann.max_epochs, ann.seed), (10, 100, 9));
        let RegressorSpec::Ensemble { members, weights } = &specs[3] else { panic!() };
        assert_eq!(members.len(), 4);
        assert_eq!(*weights, WeightMode::Optimized);
    }

    #[test]
    fn seed_override_reaches_all_seeded_components() {
        let json = r#"{
            "synthetic": { "days": 30, "seed": 1 },
            "bootstrap": { "seed": 2 },
            "models": [{"kind": "ann", "seed": 3}, {"kind": "ens"}]
        }"#;
        let mut config: ExperimentConfig = serde_json::from_str(json).unwrap();
        config.apply_overrides(Some(42), None, None);
        assert_eq!(config.bootstrap.seed, 42);
        assert_eq!(config.synthetic.as_ref().unwrap().seed, 42);
        let ModelConfig::Ann { seed, .. } = &config.models[0] else { panic!() };
        assert_eq!(*seed, Some(42));
        // the override reaches into ensemble members too
        let RegressorSpec::Ensemble { members, .. } = config.models[1].resolve(4) else {
            panic!()
        };
        let ann = members.iter().find_map(|m| match m {
            RegressorSpec::Ann(spec) => Some(spec.seed),
            _ => None,
        });
        assert_eq!(ann, Some(42));
    }
}
