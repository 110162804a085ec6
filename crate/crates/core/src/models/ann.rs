//! One-hidden-layer feed-forward network trained by Levenberg–Marquardt.
//!
//! Inputs and targets are z-scored; the hidden layer is tanh, the output
//! linear. Training minimizes the half-SSE of standardized residuals with
//! damped Gauss–Newton steps: λ starts at 1e-3, divides by 10 on every
//! accepted step and multiplies by 10 on every rejected one, and training
//! fails if λ passes 1e10. Weight initialization is uniform scaled by
//! fan-in from a seeded [`SplitMix64`](crate::rng::SplitMix64) stream, so
//! fits are reproducible.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Cholesky;
use crate::math;
use crate::models::{FitDiagnostics, FittedModel, ModelParams};
use crate::rng::SplitMix64;

const LAMBDA_START: f64 = 1e-3;
const LAMBDA_MAX: f64 = 1e10;
const OBJECTIVE_TOL: f64 = 1e-9;

/// ANN hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnSpec {
    #[serde(default = "default_hidden")]
    pub hidden_neurons: usize,
    #[serde(default = "default_epochs")]
    pub max_epochs: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_hidden() -> usize {
    10
}

fn default_epochs() -> usize {
    100
}

impl Default for AnnSpec {
    fn default() -> Self {
        AnnSpec { hidden_neurons: default_hidden(), max_epochs: default_epochs(), seed: 0 }
    }
}

/// Trained network weights plus standardization constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnParams {
    pub input_mean: Vec<f64>,
    pub input_std: Vec<f64>,
    pub target_mean: f64,
    pub target_std: f64,
    /// `hidden_weights[j][f]`: weight from input f to hidden neuron j.
    pub hidden_weights: Vec<Vec<f64>>,
    pub hidden_biases: Vec<f64>,
    pub output_weights: Vec<f64>,
    pub output_bias: f64,
}

impl AnnParams {
    pub fn n_inputs(&self) -> usize {
        self.input_mean.len()
    }

    pub fn n_hidden(&self) -> usize {
        self.hidden_biases.len()
    }

    /// Number of trainable parameters.
    pub fn n_parameters(&self) -> usize {
        self.n_hidden() * (self.n_inputs() + 2) + 1
    }

    fn standardize(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.input_mean)
            .zip(&self.input_std)
            .map(|((v, m), s)| (v - m) / s)
            .collect()
    }

    /// Hidden activations and the standardized output for a z-scored row.
    fn forward(&self, z: &[f64]) -> (Vec<f64>, f64) {
        let activations: Vec<f64> = self
            .hidden_weights
            .iter()
            .zip(&self.hidden_biases)
            .map(|(w, b)| {
                math::tanh(w.iter().zip(z).map(|(wf, zf)| wf * zf).sum::<f64>() + b)
            })
            .collect();
        let out = self
            .output_weights
            .iter()
            .zip(&activations)
            .map(|(w, a)| w * a)
            .sum::<f64>()
            + self.output_bias;
        (activations, out)
    }

    /// Deterministic forward pass with de-standardized output.
    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n_inputs() {
            return Err(Error::DimensionMismatch { expected: self.n_inputs(), got: x.len() });
        }
        let (_, out) = self.forward(&self.standardize(x));
        Ok(out * self.target_std + self.target_mean)
    }

    /// Flat parameter vector, ordered hidden weights (row-major), hidden
    /// biases, output weights, output bias.
    pub fn flat_parameters(&self) -> Vec<f64> {
        let mut theta = Vec::with_capacity(self.n_parameters());
        for row in &self.hidden_weights {
            theta.extend_from_slice(row);
        }
        theta.extend_from_slice(&self.hidden_biases);
        theta.extend_from_slice(&self.output_weights);
        theta.push(self.output_bias);
        theta
    }

    /// Overwrite the weights from a flat vector in [`flat_parameters`] order.
    ///
    /// [`flat_parameters`]: AnnParams::flat_parameters
    pub fn set_flat_parameters(&mut self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.n_parameters() {
            return Err(Error::DimensionMismatch {
                expected: self.n_parameters(),
                got: theta.len(),
            });
        }
        let k = self.n_inputs();
        let h = self.n_hidden();
        let mut pos = 0;
        for row in &mut self.hidden_weights {
            row.copy_from_slice(&theta[pos..pos + k]);
            pos += k;
        }
        self.hidden_biases.copy_from_slice(&theta[pos..pos + h]);
        pos += h;
        self.output_weights.copy_from_slice(&theta[pos..pos + h]);
        pos += h;
        self.output_bias = theta[pos];
        Ok(())
    }

    /// Standardized residuals rᵢ = outᵢ − tᵢ over raw rows and targets.
    pub fn standardized_residuals(&self, rows: &[Vec<f64>], y: &[f64]) -> Result<Vec<f64>> {
        if rows.len() != y.len() {
            return Err(Error::DimensionMismatch { expected: rows.len(), got: y.len() });
        }
        rows.iter()
            .zip(y)
            .map(|(x, target)| {
                if x.len() != self.n_inputs() {
                    return Err(Error::DimensionMismatch {
                        expected: self.n_inputs(),
                        got: x.len(),
                    });
                }
                let (_, out) = self.forward(&self.standardize(x));
                Ok(out - (target - self.target_mean) / self.target_std)
            })
            .collect()
    }

    /// Jacobian of the standardized residuals with respect to the flat
    /// parameters, row-major `rows.len() × n_parameters()`.
    pub fn residual_jacobian(&self, rows: &[Vec<f64>]) -> Result<Vec<f64>> {
        let k = self.n_inputs();
        let h = self.n_hidden();
        let p = self.n_parameters();
        let mut jac = vec![0.0; rows.len() * p];
        for (i, x) in rows.iter().enumerate() {
            if x.len() != k {
                return Err(Error::DimensionMismatch { expected: k, got: x.len() });
            }
            let z = self.standardize(x);
            let (activations, _) = self.forward(&z);
            let row = &mut jac[i * p..(i + 1) * p];
            for j in 0..h {
                let gate = self.output_weights[j] * (1.0 - activations[j] * activations[j]);
                for (f, zf) in z.iter().enumerate() {
                    row[j * k + f] = gate * zf;
                }
                row[h * k + j] = gate;
                row[h * k + h + j] = activations[j];
            }
            row[p - 1] = 1.0;
        }
        Ok(jac)
    }
}

fn column_stats(rows: &[Vec<f64>], col: usize) -> (f64, f64) {
    let n = rows.len();
    let mean = rows.iter().map(|r| r[col]).sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 1.0);
    }
    let var = rows.iter().map(|r| (r[col] - mean) * (r[col] - mean)).sum::<f64>()
        / (n - 1) as f64;
    let std = math::sqrt(var);
    (mean, if std < 1e-12 { 1.0 } else { std })
}

fn scalar_stats(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 1.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    let std = math::sqrt(var);
    (mean, if std < 1e-12 { 1.0 } else { std })
}

fn half_sse(residuals: &[f64]) -> f64 {
    0.5 * residuals.iter().map(|r| r * r).sum::<f64>()
}

/// Train the network on predictor rows (no intercept column) and targets.
pub fn fit_ann(rows: &[Vec<f64>], y: &[f64], spec: &AnnSpec) -> Result<FittedModel> {
    if spec.hidden_neurons == 0 {
        return Err(Error::InvalidHyperparameter("hidden_neurons must be at least 1"));
    }
    if rows.is_empty() {
        return Err(Error::EmptySample);
    }
    if y.len() != rows.len() {
        return Err(Error::DimensionMismatch { expected: rows.len(), got: y.len() });
    }
    let k = rows[0].len();
    for row in rows {
        if row.len() != k {
            return Err(Error::DimensionMismatch { expected: k, got: row.len() });
        }
    }

    let h = spec.hidden_neurons;
    let (target_mean, target_std) = scalar_stats(y);
    let mut params = AnnParams {
        input_mean: (0..k).map(|c| column_stats(rows, c).0).collect(),
        input_std: (0..k).map(|c| column_stats(rows, c).1).collect(),
        target_mean,
        target_std,
        hidden_weights: vec![vec![0.0; k]; h],
        hidden_biases: vec![0.0; h],
        output_weights: vec![0.0; h],
        output_bias: 0.0,
    };

    let mut rng = SplitMix64::new(spec.seed);
    let input_scale = 1.0 / math::sqrt(k.max(1) as f64);
    for row in &mut params.hidden_weights {
        for w in row.iter_mut() {
            *w = rng.next_range(-1.0, 1.0) * input_scale;
        }
    }
    let hidden_scale = 1.0 / math::sqrt(h as f64);
    for w in &mut params.output_weights {
        *w = rng.next_range(-1.0, 1.0) * hidden_scale;
    }

    let p = params.n_parameters();
    let mut theta = params.flat_parameters();
    let mut residuals = params.standardized_residuals(rows, y)?;
    let mut objective = half_sse(&residuals);
    let mut trace = vec![objective];
    let mut lambda = LAMBDA_START;
    let mut epochs = 0usize;

    while epochs < spec.max_epochs {
        let jac = params.residual_jacobian(rows)?;
        let mut gradient = vec![0.0; p];
        let mut hessian = vec![0.0; p * p];
        for (i, r) in residuals.iter().enumerate() {
            let jrow = &jac[i * p..(i + 1) * p];
            for a in 0..p {
                gradient[a] += jrow[a] * r;
                for b in a..p {
                    hessian[a * p + b] += jrow[a] * jrow[b];
                }
            }
        }
        for a in 0..p {
            for b in 0..a {
                hessian[a * p + b] = hessian[b * p + a];
            }
        }

        let previous = objective;
        loop {
            let mut damped = hessian.clone();
            for d in 0..p {
                damped[d * p + d] += lambda;
            }
            let step = match Cholesky::factor(&damped, p) {
                Ok(ch) => {
                    let neg_g: Vec<f64> = gradient.iter().map(|g| -g).collect();
                    Some(ch.solve(&neg_g))
                }
                // Rank collapse at this damping: treat like a rejected step.
                Err(Error::SingularMatrix) => None,
                Err(e) => return Err(e),
            };
            if let Some(delta) = step {
                let candidate: Vec<f64> =
                    theta.iter().zip(&delta).map(|(t, d)| t + d).collect();
                params.set_flat_parameters(&candidate)?;
                let candidate_residuals = params.standardized_residuals(rows, y)?;
                let candidate_objective = half_sse(&candidate_residuals);
                if candidate_objective <= objective {
                    theta = candidate;
                    residuals = candidate_residuals;
                    objective = candidate_objective;
                    lambda /= 10.0;
                    epochs += 1;
                    trace.push(objective);
                    break;
                }
                params.set_flat_parameters(&theta)?;
            }
            lambda *= 10.0;
            if lambda > LAMBDA_MAX {
                return Err(Error::NonConvergence { iterations: epochs, objective });
            }
        }
        if (previous - objective).abs() < OBJECTIVE_TOL {
            break;
        }
    }

    params.set_flat_parameters(&theta)?;
    Ok(FittedModel::new(
        ModelParams::Ann(params),
        FitDiagnostics { iterations: epochs, final_objective: objective, objective_trace: trace },
    ))
}
