//! Forecasting kernels for daily-peak solar PV generation.
//!
//! The crate covers the numeric side of the pipeline: error metrics over
//! paired series, all-subsets predictor scoring (adjusted R², AIC, AICc,
//! BIC, leave-one-out CV), five regression models behind one fit/predict
//! contract (multiple linear regression, quantile regression, support
//! vector regression, a Levenberg–Marquardt-trained neural network, and a
//! weighted ensemble), and bootstrap uncertainty estimates for forecast
//! error populations.
//!
//! Everything here is deterministic: fits depend only on data,
//! hyperparameters, and an explicit seed, and random draws come from
//! counter-based [`rng::SplitMix64`] substreams so results do not depend
//! on evaluation order.
//!
//! The crate is `no_std`-compatible (`alloc` required); enable the `libm`
//! feature when building without `std`.

#![cfg_attr(not(feature = "std"), no_std)]

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("peakcast-core needs either the `std` feature or the `libm` feature");

extern crate alloc;

pub mod error;
pub mod linalg;
mod math;
pub mod metrics;
pub mod models;
pub mod predictor;
pub mod rng;
pub mod selection;
pub mod uncertainty;

pub use error::{Error, Result};
pub use linalg::DesignMatrix;
pub use predictor::{Predictor, PredictorSet, Predictors};
