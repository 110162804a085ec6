//! Predictor-subset scoring.
//!
//! Every nonempty subset of the four candidate predictors gets a
//! least-squares fit and six scores: training RMSE, adjusted R², AIC,
//! AICc, BIC, and the leverage-weighted leave-one-out CV (PRESS/N).
//! Larger adjusted R² is better; for every other criterion smaller is
//! better. `k` always counts predictors only — the intercept is implicit
//! and never counted.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Cholesky, DesignMatrix};
use crate::math;
use crate::models::{fit_mlr, ModelParams};
use crate::predictor::{PredictorSet, Predictors};

/// Which BIC expression to use.
///
/// `Printed` is N·ln(SSE/N) + 2(k+2)·ln N; `Standard` drops the leading 2
/// of the penalty: N·ln(SSE/N) + (k+2)·ln N. The printed form charges
/// each extra predictor twice as hard, so the two forms can prefer
/// different subsets in close calls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BicForm {
    #[default]
    Printed,
    Standard,
}

/// The six columns of a subset-score report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    Rmse,
    Rbar2,
    Aic,
    Aicc,
    Bic,
    Cv,
}

impl Criterion {
    pub const ALL: [Criterion; 6] = [
        Criterion::Rmse,
        Criterion::Rbar2,
        Criterion::Aic,
        Criterion::Aicc,
        Criterion::Bic,
        Criterion::Cv,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Criterion::Rmse => "rmse",
            Criterion::Rbar2 => "rbar2",
            Criterion::Aic => "aic",
            Criterion::Aicc => "aicc",
            Criterion::Bic => "bic",
            Criterion::Cv => "cv",
        }
    }

    pub fn value(self, score: &SubsetScore) -> f64 {
        match self {
            Criterion::Rmse => score.rmse,
            Criterion::Rbar2 => score.rbar2,
            Criterion::Aic => score.aic,
            Criterion::Aicc => score.aicc,
            Criterion::Bic => score.bic,
            Criterion::Cv => score.cv,
        }
    }

    /// Adjusted R² is maximized; everything else is minimized.
    pub fn prefers_max(self) -> bool {
        matches!(self, Criterion::Rbar2)
    }
}

/// All six scores for one predictor subset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetScore {
    pub subset: PredictorSet,
    pub rmse: f64,
    pub rbar2: f64,
    pub aic: f64,
    pub aicc: f64,
    pub bic: f64,
    pub cv: f64,
    pub sse: f64,
}

/// Diagonal of the hat matrix H = X(XᵀX)⁻¹Xᵀ, computed row by row (the
/// full N×N matrix is never formed): hᵢ = ‖L⁻¹xᵢ‖² with XᵀX = LLᵀ.
///
/// Each hᵢ lies in [0, 1] and the diagonal sums to k+1.
pub fn hat_diagonals(x: &DesignMatrix) -> Result<Vec<f64>> {
    let chol = Cholesky::factor(&x.xtx(), x.n_cols())?;
    Ok((0..x.n_rows())
        .map(|i| {
            let z = chol.forward(x.row(i));
            z.iter().map(|v| v * v).sum::<f64>().clamp(0.0, 1.0)
        })
        .collect())
}

/// Adjusted R²: 1 − (1 − R²)(N−1)/(N−k−1), with R² = 1 − SSE/SST.
pub fn rbar2(sse: f64, sst: f64, n: usize, k: usize) -> Result<f64> {
    if n <= k + 1 {
        return Err(Error::TooFewSamples { needed: k + 2, got: n });
    }
    if sst <= 0.0 {
        return Err(Error::DegenerateTarget);
    }
    let r2 = 1.0 - sse / sst;
    Ok(1.0 - (1.0 - r2) * (n - 1) as f64 / (n - k - 1) as f64)
}

/// AIC: N·ln(SSE/N) + 2(k+2).
pub fn aic(sse: f64, n: usize, k: usize) -> Result<f64> {
    if sse <= 0.0 {
        return Err(Error::ZeroSse);
    }
    Ok(n as f64 * math::ln(sse / n as f64) + 2.0 * (k + 2) as f64)
}

/// Small-sample correction: AIC + 2k(k+1)/(N−k−1).
pub fn aicc(aic: f64, n: usize, k: usize) -> Result<f64> {
    if n <= k + 1 {
        return Err(Error::TooFewSamples { needed: k + 2, got: n });
    }
    Ok(aic + 2.0 * (k * (k + 1)) as f64 / (n - k - 1) as f64)
}

/// BIC in the form selected by [`BicForm`].
pub fn bic(sse: f64, n: usize, k: usize, form: BicForm) -> Result<f64> {
    if sse <= 0.0 {
        return Err(Error::ZeroSse);
    }
    if n < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: n });
    }
    let penalty = match form {
        BicForm::Printed => 2.0 * (k + 2) as f64,
        BicForm::Standard => (k + 2) as f64,
    };
    Ok(n as f64 * math::ln(sse / n as f64) + penalty * math::ln(n as f64))
}

/// Leave-one-out CV from residuals and leverages: (1/N) Σ [eᵢ/(1−hᵢ)]².
pub fn cv_press(residuals: &[f64], leverages: &[f64]) -> Result<f64> {
    if residuals.len() != leverages.len() || residuals.is_empty() {
        return Err(Error::DimensionMismatch {
            expected: residuals.len(),
            got: leverages.len(),
        });
    }
    let mut sum = 0.0;
    for (i, (e, h)) in residuals.iter().zip(leverages).enumerate() {
        if *h >= 1.0 - 1e-10 {
            return Err(Error::SaturatedLeverage { index: i });
        }
        let press = e / (1.0 - h);
        sum += press * press;
    }
    Ok(sum / residuals.len() as f64)
}

/// Score every nonempty subset of `pool` against the target; with the
/// full pool that is the 15 subsets of {S, D, R, T}.
///
/// Needs at least 8 samples. Each subset carries its own result so a
/// degenerate fit (rank deficiency, zero SSE) marks only its row.
pub fn score_all_subsets(
    samples: &[Predictors],
    target: &[f64],
    pool: PredictorSet,
    bic_form: BicForm,
) -> Result<Vec<(PredictorSet, Result<SubsetScore>)>> {
    if pool.is_empty() {
        return Err(Error::EmptyPredictorSet);
    }
    if samples.len() != target.len() {
        return Err(Error::DimensionMismatch { expected: samples.len(), got: target.len() });
    }
    if samples.len() < 8 {
        return Err(Error::TooFewSamples { needed: 8, got: samples.len() });
    }
    let n = target.len();
    let mean = target.iter().sum::<f64>() / n as f64;
    let sst: f64 = target.iter().map(|y| (y - mean) * (y - mean)).sum();

    Ok(PredictorSet::non_empty_subsets()
        .filter(|subset| subset.is_subset_of(pool))
        .map(|subset| (subset, score_subset(samples, target, sst, subset, bic_form)))
        .collect())
}

fn score_subset(
    samples: &[Predictors],
    target: &[f64],
    sst: f64,
    subset: PredictorSet,
    bic_form: BicForm,
) -> Result<SubsetScore> {
    let n = target.len();
    let k = subset.len();
    let rows: Vec<Vec<f64>> = samples.iter().map(|s| s.select(subset)).collect();
    let x = DesignMatrix::from_rows(&rows)?;
    let model = fit_mlr(&x, target)?;
    let ModelParams::Mlr { coefficients } = &model.params else { unreachable!() };

    let residuals: Vec<f64> = (0..n).map(|i| target[i] - x.fitted(i, coefficients)).collect();
    let sse: f64 = residuals.iter().map(|e| e * e).sum();
    let aic_value = aic(sse, n, k)?;
    let leverages = hat_diagonals(&x)?;

    Ok(SubsetScore {
        subset,
        rmse: math::sqrt(sse / n as f64),
        rbar2: rbar2(sse, sst, n, k)?,
        aic: aic_value,
        aicc: aicc(aic_value, n, k)?,
        bic: bic(sse, n, k, bic_form)?,
        cv: cv_press(&residuals, &leverages)?,
        sse,
    })
}

/// The winning subset under one criterion, ignoring failed rows.
pub fn best_subset(rows: &[SubsetScore], criterion: Criterion) -> Option<PredictorSet> {
    let better = |a: f64, b: f64| {
        if criterion.prefers_max() { a > b } else { a < b }
    };
    let mut best: Option<&SubsetScore> = None;
    for row in rows {
        match best {
            Some(current) if !better(criterion.value(row), criterion.value(current)) => {}
            _ => best = Some(row),
        }
    }
    best.map(|s| s.subset)
}
