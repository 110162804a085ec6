//! Error metrics over paired actual/predicted series.
//!
//! Sign convention: errors are `actual − predicted`, so a negative
//! [`bias`] means the predictions overestimate.

use crate::error::{Error, Result};
use crate::math;

/// A pair of equal-length, nonempty series: actual values and predictions.
#[derive(Debug, Clone, Copy)]
pub struct PairedSeries<'a> {
    actual: &'a [f64],
    predicted: &'a [f64],
}

impl<'a> PairedSeries<'a> {
    pub fn new(actual: &'a [f64], predicted: &'a [f64]) -> Result<Self> {
        if actual.is_empty() || actual.len() != predicted.len() {
            return Err(Error::SeriesLength {
                actual: actual.len(),
                predicted: predicted.len(),
            });
        }
        Ok(PairedSeries { actual, predicted })
    }

    /// Number of pairs N; at least 1 by construction.
    pub fn len(&self) -> usize {
        self.actual.len()
    }

    fn errors(&self) -> impl Iterator<Item = f64> + '_ {
        self.actual
            .iter()
            .zip(self.predicted)
            .map(|(y, yhat)| y - yhat)
    }
}

/// Mean absolute percentage error: (1/N) Σ |(yᵢ − ŷᵢ)/yᵢ| × 100.
///
/// Undefined when any actual value is zero (the percentage denominator),
/// which is why weather-variable errors are quantified with [`mae`] instead.
pub fn mape(p: &PairedSeries) -> Result<f64> {
    if let Some(index) = p.actual.iter().position(|y| *y == 0.0) {
        return Err(Error::ZeroActual { index });
    }
    let sum: f64 = p
        .actual
        .iter()
        .zip(p.predicted)
        .map(|(y, yhat)| ((y - yhat) / y).abs())
        .sum();
    Ok(sum / p.len() as f64 * 100.0)
}

/// Mean absolute error: (1/N) Σ |yᵢ − ŷᵢ|.
pub fn mae(p: &PairedSeries) -> f64 {
    p.errors().map(f64::abs).sum::<f64>() / p.len() as f64
}

/// Root-mean-square error: √((1/N) Σ (yᵢ − ŷᵢ)²).
pub fn rmse(p: &PairedSeries) -> f64 {
    math::sqrt(p.errors().map(|e| e * e).sum::<f64>() / p.len() as f64)
}

/// Signed mean error: (1/N) Σ (yᵢ − ŷᵢ). Negative means overestimation.
pub fn bias(p: &PairedSeries) -> f64 {
    p.errors().sum::<f64>() / p.len() as f64
}
