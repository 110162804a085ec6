//! End-to-end daily-peak solar forecasting pipeline.
//!
//! Wraps [`peakcast_core`] with everything that touches the outside world:
//! CSV ingestion and alignment ([`dataset`]), experiment configuration
//! ([`config`]), a deterministic synthetic-data generator ([`synth`]),
//! report files ([`report`]), and the four commands behind the `peakcast`
//! binary ([`commands`]): `synth`, `select`, `weather-error`, and `run`.

pub mod commands;
pub mod config;
pub mod dataset;
pub mod error;
pub mod report;
pub mod synth;
pub mod time;

pub use error::PipelineError;
