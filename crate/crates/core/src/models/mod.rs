//! Five regression models behind one fit/predict contract.
//!
//! Multiple linear regression ([`fit_mlr`]), quantile regression
//! ([`fit_qr`]), ε-insensitive support vector regression ([`fit_svr`]), a
//! one-hidden-layer neural network trained by Levenberg–Marquardt
//! ([`fit_ann`]), and a weighted-average ensemble ([`fit_ensemble`]).
//! Every fit is deterministic given data, hyperparameters, and seed, and
//! produces a [`FittedModel`] whose JSON serialization round-trips to
//! bit-identical predictions.

mod ann;
mod ensemble;
mod mlr;
mod qr;
mod svr;

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

pub use ann::{fit_ann, AnnParams, AnnSpec};
pub use ensemble::{fit_ensemble, WeightMode};
pub use mlr::{fit_mlr, predict_linear};
pub use qr::{fit_qr, pinball_loss};
pub use svr::{fit_svr, SvrParams};

use crate::error::{Error, Result};
use crate::linalg::DesignMatrix;

/// Schema tag written into every serialized model document.
pub const MODEL_SCHEMA: &str = "peakcast.model.v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Mlr,
    Qr,
    Svr,
    Ann,
    Ensemble,
}

impl ModelKind {
    /// Short uppercase label used in reports.
    pub fn label(self) -> &'static str {
        match self {
            ModelKind::Mlr => "MLR",
            ModelKind::Qr => "QR",
            ModelKind::Svr => "SVR",
            ModelKind::Ann => "ANN",
            ModelKind::Ensemble => "ENS",
        }
    }

    /// Lowercase name used for file stems.
    pub fn file_stem(self) -> &'static str {
        match self {
            ModelKind::Mlr => "mlr",
            ModelKind::Qr => "qr",
            ModelKind::Svr => "svr",
            ModelKind::Ann => "ann",
            ModelKind::Ensemble => "ens",
        }
    }
}

/// SVR kernel. The RBF kernel is K(a, b) = exp(−γ‖a − b‖²).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kernel {
    Linear,
    Rbf { gamma: f64 },
}

impl Kernel {
    /// RBF kernel with the conventional default γ = 1/k for k predictors.
    pub fn rbf_with_default_gamma(n_predictors: usize) -> Kernel {
        Kernel::Rbf { gamma: 1.0 / n_predictors.max(1) as f64 }
    }

    pub(crate) fn apply(&self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Kernel::Linear => a.iter().zip(b).map(|(x, y)| x * y).sum(),
            Kernel::Rbf { gamma } => {
                let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
                crate::math::exp(-gamma * d2)
            }
        }
    }
}

/// What to train, with kind-specific hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RegressorSpec {
    Mlr,
    Qr { tau: f64 },
    Svr(SvrParams),
    Ann(AnnSpec),
    Ensemble { members: Vec<RegressorSpec>, weights: WeightMode },
}

impl RegressorSpec {
    pub fn kind(&self) -> ModelKind {
        match self {
            RegressorSpec::Mlr => ModelKind::Mlr,
            RegressorSpec::Qr { .. } => ModelKind::Qr,
            RegressorSpec::Svr(_) => ModelKind::Svr,
            RegressorSpec::Ann(_) => ModelKind::Ann,
            RegressorSpec::Ensemble { .. } => ModelKind::Ensemble,
        }
    }
}

/// Trained parameters, tagged by kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelParams {
    /// Least-squares coefficients, intercept first.
    Mlr { coefficients: Vec<f64> },
    /// Quantile-regression coefficients for quantile `tau`, intercept first.
    Qr { tau: f64, coefficients: Vec<f64> },
    /// Dual coefficients and retained support inputs; the prediction is
    /// Σᵢ dual_coefficients[i]·K(support_vectors[i], x) + bias.
    Svr {
        kernel: Kernel,
        bias: f64,
        dual_coefficients: Vec<f64>,
        support_vectors: Vec<Vec<f64>>,
    },
    /// Network weights plus the input/target standardization constants.
    Ann(AnnParams),
    /// Member models and their simplex weights.
    Ensemble { members: Vec<FittedModel>, weights: Vec<f64> },
}

/// Training diagnostics kept alongside the parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitDiagnostics {
    /// Accepted iterations (solver-specific; 1 for a direct solve).
    pub iterations: usize,
    /// Final value of the objective the solver minimized.
    pub final_objective: f64,
    /// Objective value after each accepted iteration, when the solver is
    /// iterative; empty for direct solves.
    #[serde(default)]
    pub objective_trace: Vec<f64>,
}

/// A trained model: schema tag, parameters, and training diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedModel {
    pub schema: String,
    pub params: ModelParams,
    pub diagnostics: FitDiagnostics,
}

impl FittedModel {
    pub(crate) fn new(params: ModelParams, diagnostics: FitDiagnostics) -> Self {
        FittedModel { schema: String::from(MODEL_SCHEMA), params, diagnostics }
    }

    pub fn kind(&self) -> ModelKind {
        match &self.params {
            ModelParams::Mlr { .. } => ModelKind::Mlr,
            ModelParams::Qr { .. } => ModelKind::Qr,
            ModelParams::Svr { .. } => ModelKind::Svr,
            ModelParams::Ann(_) => ModelKind::Ann,
            ModelParams::Ensemble { .. } => ModelKind::Ensemble,
        }
    }

    /// Number of predictor values a prediction row must carry.
    pub fn n_predictors(&self) -> usize {
        match &self.params {
            ModelParams::Mlr { coefficients } | ModelParams::Qr { coefficients, .. } => {
                coefficients.len() - 1
            }
            ModelParams::Svr { support_vectors, .. } => {
                support_vectors.first().map_or(0, Vec::len)
            }
            ModelParams::Ann(p) => p.n_inputs(),
            ModelParams::Ensemble { members, .. } => {
                members.first().map_or(0, FittedModel::n_predictors)
            }
        }
    }

    /// Predict one target value from a predictor row, dispatching on kind.
    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        match &self.params {
            ModelParams::Mlr { coefficients } | ModelParams::Qr { coefficients, .. } => {
                predict_linear(coefficients, x)
            }
            ModelParams::Svr { kernel, bias, dual_coefficients, support_vectors } => {
                svr::predict(kernel, *bias, dual_coefficients, support_vectors, x)
            }
            ModelParams::Ann(p) => p.predict(x),
            ModelParams::Ensemble { members, weights } => {
                let mut out = 0.0;
                for (member, w) in members.iter().zip(weights) {
                    out += w * member.predict(x)?;
                }
                Ok(out)
            }
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serialization cannot fail")
    }

    pub fn from_json(s: &str) -> core::result::Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

/// Train `spec` on predictor rows (no intercept column) and targets.
pub fn fit(spec: &RegressorSpec, rows: &[Vec<f64>], y: &[f64]) -> Result<FittedModel> {
    match spec {
        RegressorSpec::Mlr => fit_mlr(&DesignMatrix::from_rows(rows)?, y),
        RegressorSpec::Qr { tau } => fit_qr(&DesignMatrix::from_rows(rows)?, y, *tau),
        RegressorSpec::Svr(params) => fit_svr(rows, y, params),
        RegressorSpec::Ann(spec) => fit_ann(rows, y, spec),
        RegressorSpec::Ensemble { members, weights } => {
            if members.len() < 2 {
                return Err(Error::InvalidHyperparameter("ensemble needs at least 2 members"));
            }
            let fitted = members
                .iter()
                .map(|m| fit(m, rows, y))
                .collect::<Result<Vec<_>>>()?;
            fit_ensemble(fitted, rows, y, *weights)
        }
    }
}
