//! Weighted-average ensemble over trained member models.
//!
//! Weights live on the probability simplex. `Equal` uses 1/m everywhere;
//! `Optimized` minimizes the in-sample SSE of the weighted prediction by
//! projected gradient descent, starting from the best single member so the
//! result can never be worse than any individual model.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{FitDiagnostics, FittedModel, ModelParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightMode {
    Equal,
    Optimized,
}

const MAX_ITERATIONS: usize = 100_000;
const STEP_TOL: f64 = 1e-14;

/// Combine already-trained members on the training data.
pub fn fit_ensemble(
    members: Vec<FittedModel>,
    rows: &[Vec<f64>],
    y: &[f64],
    mode: WeightMode,
) -> Result<FittedModel> {
    if members.len() < 2 {
        return Err(Error::InvalidHyperparameter("ensemble needs at least 2 members"));
    }
    if rows.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: rows.len(), got: y.len() });
    }
    let m = members.len();
    let n = rows.len();

    // member-major prediction matrix
    let mut preds = Vec::with_capacity(m);
    for member in &members {
        let p: Result<Vec<f64>> = rows.iter().map(|row| member.predict(row)).collect();
        preds.push(p?);
    }

    let sse_of = |w: &[f64]| -> f64 {
        (0..n)
            .map(|i| {
                let combined: f64 = w.iter().zip(&preds).map(|(wj, pj)| wj * pj[i]).sum();
                let e = y[i] - combined;
                e * e
            })
            .sum()
    };

    let (weights, iterations) = match mode {
        WeightMode::Equal => (vec![1.0 / m as f64; m], 0),
        WeightMode::Optimized => optimize_weights(&preds, y, n),
    };
    let objective = sse_of(&weights);

    Ok(FittedModel::new(
        ModelParams::Ensemble { members, weights },
        FitDiagnostics {
            iterations,
            final_objective: objective,
            objective_trace: Vec::new(),
        },
    ))
}

fn optimize_weights(preds: &[Vec<f64>], y: &[f64], n: usize) -> (Vec<f64>, usize) {
    let m = preds.len();
    // Gram matrix of member predictions and their correlation with y.
    let mut gram = vec![0.0; m * m];
    let mut corr = vec![0.0; m];
    for j in 0..m {
        for l in j..m {
            let v: f64 = (0..n).map(|i| preds[j][i] * preds[l][i]).sum();
            gram[j * m + l] = v;
            gram[l * m + j] = v;
        }
        corr[j] = (0..n).map(|i| preds[j][i] * y[i]).sum();
    }

    // SSE(w) = wᵀGw − 2wᵀc + yᵀy, so each member alone scores Gⱼⱼ − 2cⱼ.
    let mut best = 0;
    let mut best_score = f64::INFINITY;
    for j in 0..m {
        let score = gram[j * m + j] - 2.0 * corr[j];
        if score < best_score {
            best_score = score;
            best = j;
        }
    }
    let mut w = vec![0.0; m];
    w[best] = 1.0;

    // Gradient Lipschitz constant is 2·λmax(G); estimate λmax by power
    // iteration so the fixed step 1/L keeps descent monotone.
    let mut v = vec![1.0 / m as f64; m];
    let mut lambda_max = 1.0;
    for _ in 0..100 {
        let mut next = vec![0.0; m];
        for j in 0..m {
            for l in 0..m {
                next[j] += gram[j * m + l] * v[l];
            }
        }
        let norm = crate::math::sqrt(next.iter().map(|x| x * x).sum::<f64>());
        if norm < 1e-300 {
            break;
        }
        lambda_max = norm;
        for (vj, nj) in v.iter_mut().zip(&next) {
            *vj = nj / norm;
        }
    }
    let step = 1.0 / (2.0 * lambda_max.max(1e-12) * 1.01);

    let mut iterations = 0;
    for _ in 0..MAX_ITERATIONS {
        let mut grad = vec![0.0; m];
        for j in 0..m {
            let gw: f64 = (0..m).map(|l| gram[j * m + l] * w[l]).sum();
            grad[j] = 2.0 * (gw - corr[j]);
        }
        let moved: Vec<f64> = w.iter().zip(&grad).map(|(wj, g)| wj - step * g).collect();
        let projected = project_to_simplex(&moved);
        iterations += 1;
        let delta = projected
            .iter()
            .zip(&w)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0_f64, f64::max);
        w = projected;
        if delta < STEP_TOL {
            break;
        }
    }
    (w, iterations)
}

/// Euclidean projection onto {w : wⱼ ≥ 0, Σwⱼ = 1}.
fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (j, &val) in sorted.iter().enumerate() {
        cumulative += val;
        let candidate = (cumulative - 1.0) / (j + 1) as f64;
        if val - candidate > 0.0 {
            theta = candidate;
        }
    }
    v.iter().map(|x| (x - theta).max(0.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{fit_mlr, RegressorSpec};
    use crate::linalg::DesignMatrix;
    use crate::rng::SplitMix64;

    fn constant_model(c: f64) -> FittedModel {
        FittedModel::new(
            ModelParams::Mlr { coefficients: vec![c] },
            FitDiagnostics { iterations: 1, final_objective: 0.0, objective_trace: Vec::new() },
        )
    }

    #[test]
    fn degenerate_weights_reproduce_single_member() {
        let members = vec![constant_model(2.0), constant_model(4.0)];
        let model = FittedModel::new(
            ModelParams::Ensemble { members, weights: vec![1.0, 0.0] },
            FitDiagnostics { iterations: 0, final_objective: 0.0, objective_trace: Vec::new() },
        );
        assert_eq!(model.predict(&[]).unwrap(), 2.0);
    }

    #[test]
    fn equal_weights_average_constant_members() {
        let rows: Vec<Vec<f64>> = vec![Vec::new(); 5];
        let y = vec![3.0; 5];
        let members = vec![constant_model(2.0), constant_model(4.0)];
        let model = fit_ensemble(members, &rows, &y, WeightMode::Equal).unwrap();
        assert_eq!(model.predict(&[]).unwrap(), 3.0);
    }

    #[test]
    fn optimized_weights_stay_on_simplex_and_beat_best_member() {
        let mut rng = SplitMix64::new(31);
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|_| vec![rng.next_range(0.0, 10.0), rng.next_range(-3.0, 3.0)])
            .collect();
        let y: Vec<f64> = rows
            .iter()
            .map(|r| 2.0 + 0.7 * r[0] - 1.2 * r[1] + 0.4 * rng.next_normal())
            .collect();

        let x = DesignMatrix::from_rows(&rows).unwrap();
        let mlr = fit_mlr(&x, &y).unwrap();
        let qr = crate::models::fit(&RegressorSpec::Qr { tau: 0.5 }, &rows, &y).unwrap();
        // an intentionally bad member: predicts 5.0 regardless of inputs
        let biased = FittedModel::new(
            ModelParams::Mlr { coefficients: vec![5.0, 0.0, 0.0] },
            FitDiagnostics { iterations: 1, final_objective: 0.0, objective_trace: Vec::new() },
        );

        let sse = |model: &FittedModel| -> f64 {
            rows.iter()
                .zip(&y)
                .map(|(row, target)| {
                    let e = target - model.predict(row).unwrap();
                    e * e
                })
                .sum()
        };
        let best_single = [&mlr, &qr, &biased].iter().map(|m| sse(m)).fold(f64::INFINITY, f64::min);

        let ens = fit_ensemble(vec![mlr, qr, biased], &rows, &y, WeightMode::Optimized).unwrap();
        let ModelParams::Ensemble { weights, .. } = &ens.params else { unreachable!() };
        let sum: f64 = weights.iter().sum();
        assert!((sum - 1.0).abs() < 1e-10, "weights sum {sum}");
        assert!(weights.iter().all(|w| *w >= -1e-12));
        assert!(sse(&ens) <= best_single + 1e-8);
    }

    #[test]
    fn simplex_projection_properties() {
        for v in [vec![0.5, 0.5], vec![10.0, -3.0, 0.1], vec![-1.0, -2.0], vec![0.0; 4]] {
            let w = project_to_simplex(&v);
            let sum: f64 = w.iter().sum();
            assert!((sum - 1.0).abs() < 1e-12, "{v:?} -> {w:?}");
            assert!(w.iter().all(|x| *x >= 0.0));
        }
        // already-feasible points are fixed points
        let w = project_to_simplex(&[0.25, 0.75]);
        assert!((w[0] - 0.25).abs() < 1e-12 && (w[1] - 0.75).abs() < 1e-12);
    }

    #[test]
    fn rejects_single_member() {
        let rows: Vec<Vec<f64>> = vec![Vec::new(); 3];
        let y = vec![1.0; 3];
        let err = fit_ensemble(vec![constant_model(1.0)], &rows, &y, WeightMode::Equal)
            .unwrap_err();
        assert!(matches!(err, Error::InvalidHyperparameter(_)));
    }
}
