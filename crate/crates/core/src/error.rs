//! Error type shared by all numeric modules.

use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Anything that can go wrong inside the forecasting kernels.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Actual and predicted series differ in length, or are empty.
    SeriesLength { actual: usize, predicted: usize },
    /// MAPE is undefined when an actual value is zero.
    ZeroActual { index: usize },
    /// The target has zero total variation (SST = 0).
    DegenerateTarget,
    /// SSE is exactly zero; log-based criteria are undefined.
    ZeroSse,
    /// Not enough observations for the requested computation.
    TooFewSamples { needed: usize, got: usize },
    /// XᵀX (or a damped normal matrix) is not invertible at working precision.
    SingularMatrix,
    /// A leverage of 1 makes the leave-one-out residual undefined.
    SaturatedLeverage { index: usize },
    /// A row has the wrong number of values for the model.
    DimensionMismatch { expected: usize, got: usize },
    /// A hyperparameter is outside its valid range.
    InvalidHyperparameter(&'static str),
    /// An iterative solver hit its iteration cap before converging.
    NonConvergence { iterations: usize, objective: f64 },
    /// The SVR dual solver stopped with the KKT gap still above tolerance.
    KktNotSatisfied { iterations: usize, violation: f64 },
    /// Bootstrap needs at least one observation.
    EmptySample,
    /// A predictor-set label contains a symbol outside {S, D, R, T}.
    UnknownPredictor { symbol: char },
    /// A predictor set must name at least one predictor.
    EmptyPredictorSet,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::SeriesLength { actual, predicted } => write!(
                f,
                "paired series must have equal nonzero length (actual {actual}, predicted {predicted})"
            ),
            Error::ZeroActual { index } => write!(
                f,
                "MAPE is undefined: actual value at index {index} is zero"
            ),
            Error::DegenerateTarget => {
                write!(f, "target is constant (SST = 0); fit quality is undefined")
            }
            Error::ZeroSse => write!(f, "SSE is zero; log(SSE/N) is undefined"),
            Error::TooFewSamples { needed, got } => {
                write!(f, "need at least {needed} samples, got {got}")
            }
            Error::SingularMatrix => write!(f, "design matrix is rank-deficient"),
            Error::SaturatedLeverage { index } => write!(
                f,
                "leverage at row {index} is 1; leave-one-out residual is undefined"
            ),
            Error::DimensionMismatch { expected, got } => {
                write!(f, "expected a row of {expected} values, got {got}")
            }
            Error::InvalidHyperparameter(msg) => write!(f, "invalid hyperparameter: {msg}"),
            Error::NonConvergence {
                iterations,
                objective,
            } => write!(
                f,
                "no convergence after {iterations} iterations (objective {objective})"
            ),
            Error::KktNotSatisfied {
                iterations,
                violation,
            } => write!(
                f,
                "KKT conditions not satisfied after {iterations} iterations (max violation {violation})"
            ),
            Error::EmptySample => write!(f, "sample is empty"),
            Error::UnknownPredictor { symbol } => {
                write!(f, "unknown predictor symbol `{symbol}` (expected S, D, R or T)")
            }
            Error::EmptyPredictorSet => write!(f, "predictor set is empty"),
        }
    }
}

impl core::error::Error for Error {}
