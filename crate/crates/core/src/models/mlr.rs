//! Multiple linear regression by least squares on the normal equations.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{Cholesky, DesignMatrix};
use crate::models::{FitDiagnostics, FittedModel, ModelParams};

/// Least-squares fit: β̂ minimizes Σ eᵢ². Needs N > k+1 and a full-rank
/// design; the residual vector is orthogonal to every design column.
pub fn fit_mlr(x: &DesignMatrix, y: &[f64]) -> Result<FittedModel> {
    let coefficients = solve_ls(x, y)?;
    let sse: f64 = (0..x.n_rows())
        .map(|i| {
            let e = y[i] - x.fitted(i, &coefficients);
            e * e
        })
        .sum();
    Ok(FittedModel::new(
        ModelParams::Mlr { coefficients },
        FitDiagnostics { iterations: 1, final_objective: sse, objective_trace: Vec::new() },
    ))
}

/// Solve the normal equations XᵀXβ = Xᵀy.
pub(crate) fn solve_ls(x: &DesignMatrix, y: &[f64]) -> Result<Vec<f64>> {
    if y.len() != x.n_rows() {
        return Err(Error::DimensionMismatch { expected: x.n_rows(), got: y.len() });
    }
    if x.n_rows() <= x.n_cols() {
        return Err(Error::TooFewSamples { needed: x.n_cols() + 1, got: x.n_rows() });
    }
    let chol = Cholesky::factor(&x.xtx(), x.n_cols())?;
    Ok(chol.solve(&x.xty(y)))
}

/// β̂₀ + Σ xⱼ β̂ⱼ for a predictor row without intercept.
pub fn predict_linear(coefficients: &[f64], x: &[f64]) -> Result<f64> {
    if x.len() + 1 != coefficients.len() {
        return Err(Error::DimensionMismatch { expected: coefficients.len() - 1, got: x.len() });
    }
    Ok(coefficients[0] + x.iter().zip(&coefficients[1..]).map(|(v, b)| v * b).sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use crate::rng::SplitMix64;

    #[test]
    fn recovers_exact_linear_relation() {
        let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64]).collect();
        let y: Vec<f64> = rows.iter().map(|r| 3.0 + 2.0 * r[0]).collect();
        let x = DesignMatrix::from_rows(&rows).unwrap();
        let model = fit_mlr(&x, &y).unwrap();
        let ModelParams::Mlr { coefficients } = &model.params else { unreachable!() };
        assert!((coefficients[0] - 3.0).abs() < 1e-10);
        assert!((coefficients[1] - 2.0).abs() < 1e-10);
    }

    #[test]
    fn constant_target_gives_intercept_only() {
        let rows: Vec<Vec<f64>> = (0..8).map(|i| vec![i as f64, (i * 3 % 5) as f64]).collect();
        let y = vec![4.5; 8];
        let x = DesignMatrix::from_rows(&rows).unwrap();
        let model = fit_mlr(&x, &y).unwrap();
        let ModelParams::Mlr { coefficients } = &model.params else { unreachable!() };
        assert!((coefficients[0] - 4.5).abs() < 1e-10);
        assert!(coefficients[1].abs() < 1e-10);
        assert!(coefficients[2].abs() < 1e-10);
    }

    #[test]
    fn residuals_orthogonal_to_design_columns() {
        let mut rng = SplitMix64::new(5);
        let rows: Vec<Vec<f64>> = (0..30)
            .map(|_| vec![rng.next_range(-2.0, 2.0), rng.next_range(0.0, 10.0), rng.next_normal()])
            .collect();
        let y: Vec<f64> = rows
            .iter()
            .map(|r| 1.0 - r[0] + 0.3 * r[1] + rng.next_normal())
            .collect();
        let x = DesignMatrix::from_rows(&rows).unwrap();
        let model = fit_mlr(&x, &y).unwrap();
        let ModelParams::Mlr { coefficients } = &model.params else { unreachable!() };
        let residuals: Vec<f64> =
            (0..30).map(|i| y[i] - x.fitted(i, coefficients)).collect();
        let y_norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        for col in 0..x.n_cols() {
            let dot: f64 = (0..30).map(|i| x.row(i)[col] * residuals[i]).sum();
            assert!(dot.abs() < 1e-8 * y_norm, "column {col} not orthogonal: {dot}");
        }
    }

    #[test]
    fn rank_deficient_design_is_rejected() {
        // second predictor is an exact multiple of the first
        let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64, 2.0 * i as f64]).collect();
        let y: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let x = DesignMatrix::from_rows(&rows).unwrap();
        assert_eq!(fit_mlr(&x, &y).unwrap_err(), Error::SingularMatrix);
    }

    #[test]
    fn predict_linear_examples() {
        assert_eq!(predict_linear(&[0.0, 0.0], &[123.0]).unwrap(), 0.0);
        assert_eq!(predict_linear(&[1.0, 2.0], &[3.0]).unwrap(), 7.0);
        assert!(matches!(
            predict_linear(&[1.0, 2.0], &[3.0, 4.0]),
            Err(Error::DimensionMismatch { expected: 1, got: 2 })
        ));
    }

    #[test]
    fn prediction_is_affine() {
        let coeffs = [2.0, -1.0, 0.5];
        let a = [1.0, 2.0];
        let b = [3.0, -4.0];
        let sum = [4.0, -2.0];
        let lhs = predict_linear(&coeffs, &a).unwrap() + predict_linear(&coeffs, &b).unwrap()
            - predict_linear(&coeffs, &[0.0, 0.0]).unwrap();
        assert!((lhs - predict_linear(&coeffs, &sum).unwrap()).abs() < 1e-12);
    }
}
