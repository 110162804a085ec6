//! CSV ingestion and alignment of observed weather, forecast weather, and
//! energy records.
//!
//! Three formats, all UTF-8 with a mandatory header row and
//! `YYYY-MM-DDTHH` timestamps:
//!
//! ```text
//! timestamp,sky_condition,dew_point,rel_humidity,temperature      observed
//! valid_time,horizon_days,sky_cover,dew_point,rel_humidity,temperature   forecast
//! timestamp,energy                                                energy
//! ```
//!
//! Observed `sky_condition` is either one of the five categorical labels
//! (mapped to its category percent) or a numeric percent, which passes
//! through unchanged.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;
use std::str::FromStr;

use peakcast_core::Predictors;
use thiserror::Error;

use crate::time::{Date, DateHour};

/// Forecasts run 1..=6 days ahead.
pub const MAX_HORIZON: u8 = 6;

pub const OBSERVED_HEADER: &str = "timestamp,sky_condition,dew_point,rel_humidity,temperature";
pub const FORECAST_HEADER: &str =
    "valid_time,horizon_days,sky_cover,dew_point,rel_humidity,temperature";
pub const ENERGY_HEADER: &str = "timestamp,energy";

#[derive(Debug, Error, PartialEq)]
pub enum DatasetError {
    #[error("missing header row")]
    Empty,
    #[error("line 1: expected header `{expected}`, found `{found}`")]
    Header { expected: &'static str, found: String },
    #[error("line {line}: {message}")]
    Row { line: usize, message: String },
    #[error("unknown sky condition `{label}`")]
    UnknownSkyCondition { label: String },
}

/// One hourly observation of the four predictors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeatherRecord {
    pub timestamp: DateHour,
    pub predictors: Predictors,
}

/// One hourly forecast of the four predictors, issued `horizon_days` ahead.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForecastRecord {
    pub valid_time: DateHour,
    pub horizon_days: u8,
    pub predictors: Predictors,
}

/// One hourly energy reading in kWh.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyRecord {
    pub timestamp: DateHour,
    pub energy: f64,
}

/// The peak-energy hour of one day.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DailyPeak {
    pub date: Date,
    pub peak_hour: u8,
    pub energy: f64,
}

/// One training/evaluation row: the daily peak and the predictors at the
/// peak hour, observed plus whatever forecast horizons exist.
#[derive(Debug, Clone, PartialEq)]
pub struct PeakSample {
    pub date: Date,
    pub peak_hour: u8,
    /// Daily peak energy, kWh; strictly positive.
    pub target: f64,
    pub observed: Predictors,
    /// Index d-1 holds the horizon-d forecast, when one exists.
    pub forecasts: [Option<Predictors>; MAX_HORIZON as usize],
}

impl PeakSample {
    pub fn forecast(&self, horizon: u8) -> Option<&Predictors> {
        self.forecasts.get(horizon as usize - 1)?.as_ref()
    }
}

/// Result of joining peaks with weather records.
#[derive(Debug, Clone, PartialEq)]
pub struct Alignment {
    pub samples: Vec<PeakSample>,
    /// Peaks dropped because no observed record exists at the peak hour.
    pub dropped_no_observed: usize,
}

/// Map a sky-condition label to its category percent.
///
/// Clear 0, Mostly Clear 25, Partly Cloudy 50, Mostly Cloudy 75,
/// Cloudy 100. Matching is case-insensitive after trimming.
pub fn adjust_sky_cover(category: &str) -> Result<f64, DatasetError> {
    match category.trim().to_ascii_lowercase().as_str() {
        "clear" => Ok(0.0),
        "mostly clear" => Ok(25.0),
        "partly cloudy" => Ok(50.0),
        "mostly cloudy" => Ok(75.0),
        "cloudy" => Ok(100.0),
        _ => Err(DatasetError::UnknownSkyCondition { label: category.trim().to_string() }),
    }
}

/// The canonical label for a category percent, when the value is one of
/// the five category percents.
pub fn sky_cover_label(percent: f64) -> Option<&'static str> {
    match percent {
        p if p == 0.0 => Some("Clear"),
        p if p == 25.0 => Some("Mostly Clear"),
        p if p == 50.0 => Some("Partly Cloudy"),
        p if p == 75.0 => Some("Mostly Cloudy"),
        p if p == 100.0 => Some("Cloudy"),
        _ => None,
    }
}

fn row_error(line: usize, message: impl Into<String>) -> DatasetError {
    DatasetError::Row { line, message: message.into() }
}

fn parse_field<T: FromStr>(raw: &str, what: &str, line: usize) -> Result<T, DatasetError> {
    raw.trim()
        .parse::<T>()
        .map_err(|_| row_error(line, format!("cannot parse {what} from `{}`", raw.trim())))
}

fn parse_finite(raw: &str, what: &str, line: usize) -> Result<f64, DatasetError> {
    let value: f64 = parse_field(raw, what, line)?;
    if !value.is_finite() {
        return Err(row_error(line, format!("{what} must be finite, got `{}`", raw.trim())));
    }
    Ok(value)
}

fn parse_percent(raw: &str, what: &str, line: usize) -> Result<f64, DatasetError> {
    let value = parse_finite(raw, what, line)?;
    if !(0.0..=100.0).contains(&value) {
        return Err(row_error(line, format!("{what} must be in [0, 100], got {value}")));
    }
    Ok(value)
}

/// Lines of a CSV body after the header, with their 1-based line numbers;
/// blank lines are skipped.
fn body_lines(content: &str) -> impl Iterator<Item = (usize, &str)> {
    content
        .lines()
        .enumerate()
        .skip(1)
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| (i + 1, l))
}

fn check_header(content: &str, expected: &'static str) -> Result<(), DatasetError> {
    let first = content.lines().next().ok_or(DatasetError::Empty)?;
    if first.trim() != expected {
        return Err(DatasetError::Header { expected, found: first.trim().to_string() });
    }
    Ok(())
}

/// Parse observed-weather CSV text. Records come back sorted by timestamp,
/// with sky-condition labels already mapped to percents.
pub fn parse_observed_str(content: &str) -> Result<Vec<WeatherRecord>, DatasetError> {
    check_header(content, OBSERVED_HEADER)?;
    let mut records = Vec::new();
    let mut seen = BTreeSet::new();
    for (line, raw) in body_lines(content) {
        let fields: Vec<&str> = raw.split(',').collect();
        if fields.len() != 5 {
            return Err(row_error(line, format!("expected 5 fields, got {}", fields.len())));
        }
        let timestamp: DateHour = fields[0]
            .trim()
            .parse()
            .map_err(|e| row_error(line, format!("{e}")))?;
        if !seen.insert(timestamp) {
            return Err(row_error(line, format!("duplicate timestamp {timestamp}")));
        }
        let sky = fields[1].trim();
        let sky_cover = if sky.parse::<f64>().is_ok() {
            parse_percent(sky, "sky_condition", line)?
        } else {
            adjust_sky_cover(sky).map_err(|e| row_error(line, format!("{e}")))?
        };
        records.push(WeatherRecord {
            timestamp,
            predictors: Predictors {
                sky_cover,
                dew_point: parse_finite(fields[2], "dew_point", line)?,
                rel_humidity: parse_percent(fields[3], "rel_humidity", line)?,
                temperature: parse_finite(fields[4], "temperature", line)?,
            },
        });
    }
    records.sort_by_key(|r| r.timestamp);
    Ok(records)
}

/// Parse forecast-weather CSV text, sorted by (valid_time, horizon_days).
pub fn parse_forecast_str(content: &str) -> Result<Vec<ForecastRecord>, DatasetError> {
    check_header(content, FORECAST_HEADER)?;
    let mut records = Vec::new();
    let mut seen = BTreeSet::new();
    for (line, raw) in body_lines(content) {
        let fields: Vec<&str> = raw.split(',').collect();
        if fields.len() != 6 {
            return Err(row_error(line, format!("expected 6 fields, got {}", fields.len())));
        }
        let valid_time: DateHour = fields[0]
            .trim()
            .parse()
            .map_err(|e| row_error(line, format!("{e}")))?;
        let horizon_days: u8 = parse_field(fields[1], "horizon_days", line)?;
        if !(1..=MAX_HORIZON).contains(&horizon_days) {
            return Err(row_error(
                line,
                format!("horizon_days must be in 1..={MAX_HORIZON}, got {horizon_days}"),
            ));
        }
        if !seen.insert((valid_time, horizon_days)) {
            return Err(row_error(
                line,
                format!("duplicate (valid_time, horizon) key ({valid_time}, {horizon_days})"),
            ));
        }
        records.push(ForecastRecord {
            valid_time,
            horizon_days,
            predictors: Predictors {
                sky_cover: parse_percent(fields[2], "sky_cover", line)?,
                dew_point: parse_finite(fields[3], "dew_point", line)?,
                rel_humidity: parse_percent(fields[4], "rel_humidity", line)?,
                temperature: parse_finite(fields[5], "temperature", line)?,
            },
        });
    }
    records.sort_by_key(|r| (r.valid_time, r.horizon_days));
    Ok(records)
}

/// Parse energy CSV text, sorted by timestamp.
pub fn parse_energy_str(content: &str) -> Result<Vec<EnergyRecord>, DatasetError> {
    check_header(content, ENERGY_HEADER)?;
    let mut records = Vec::new();
    let mut seen = BTreeSet::new();
    for (line, raw) in body_lines(content) {
        let fields: Vec<&str> = raw.split(',').collect();
        if fields.len() != 2 {
            return Err(row_error(line, format!("expected 2 fields, got {}", fields.len())));
        }
        let timestamp: DateHour = fields[0]
            .trim()
            .parse()
            .map_err(|e| row_error(line, format!("{e}")))?;
        if !seen.insert(timestamp) {
            return Err(row_error(line, format!("duplicate timestamp {timestamp}")));
        }
        let energy = parse_finite(fields[1], "energy", line)?;
        if energy < 0.0 {
            return Err(row_error(line, format!("energy must be >= 0, got {energy}")));
        }
        records.push(EnergyRecord { timestamp, energy });
    }
    records.sort_by_key(|r| r.timestamp);
    Ok(records)
}

pub fn parse_observed_csv(path: &Path) -> Result<Vec<WeatherRecord>, crate::PipelineError> {
    let content = read(path)?;
    parse_observed_str(&content).map_err(|source| dataset_err(path, source))
}

pub fn parse_forecast_csv(path: &Path) -> Result<Vec<ForecastRecord>, crate::PipelineError> {
    let content = read(path)?;
    parse_forecast_str(&content).map_err(|source| dataset_err(path, source))
}

pub fn parse_energy_csv(path: &Path) -> Result<Vec<EnergyRecord>, crate::PipelineError> {
    let content = read(path)?;
    parse_energy_str(&content).map_err(|source| dataset_err(path, source))
}

fn read(path: &Path) -> Result<String, crate::PipelineError> {
    fs::read_to_string(path)
        .map_err(|source| crate::PipelineError::Io { path: path.to_path_buf(), source })
}

fn dataset_err(path: &Path, source: DatasetError) -> crate::PipelineError {
    crate::PipelineError::Dataset { path: path.to_path_buf(), source }
}

/// One row per date whose maximum energy is positive; ties go to the
/// earliest hour; all-zero days are dropped.
pub fn extract_daily_peaks(energy: &[EnergyRecord]) -> Vec<DailyPeak> {
    let mut by_date: BTreeMap<Date, (u8, f64)> = BTreeMap::new();
    for record in energy {
        let entry = by_date
            .entry(record.timestamp.date)
            .or_insert((record.timestamp.hour, record.energy));
        if record.energy > entry.1 || (record.energy == entry.1 && record.timestamp.hour < entry.0)
        {
            *entry = (record.timestamp.hour, record.energy);
        }
    }
    by_date
        .into_iter()
        .filter(|(_, (_, energy))| *energy > 0.0)
        .map(|(date, (peak_hour, energy))| DailyPeak { date, peak_hour, energy })
        .collect()
}

/// Hourly (observed, forecast) value pairs of one variable per horizon,
/// joined on the exact timestamp. Index d−1 holds horizon d.
pub fn hourly_error_pairs(
    observed: &[WeatherRecord],
    forecasts: &[ForecastRecord],
    variable: peakcast_core::Predictor,
) -> Vec<Vec<(f64, f64)>> {
    let observed_at: BTreeMap<DateHour, Predictors> =
        observed.iter().map(|r| (r.timestamp, r.predictors)).collect();
    let mut pairs = vec![Vec::new(); MAX_HORIZON as usize];
    for record in forecasts {
        if let Some(obs) = observed_at.get(&record.valid_time) {
            pairs[record.horizon_days as usize - 1]
                .push((obs.get(variable), record.predictors.get(variable)));
        }
    }
    pairs
}

/// Join each daily peak with the observed record at its peak hour
/// (required; peaks without one are dropped and counted) and with any
/// horizon-1..6 forecasts valid at that hour.
pub fn align(
    peaks: &[DailyPeak],
    observed: &[WeatherRecord],
    forecasts: &[ForecastRecord],
) -> Alignment {
    let observed_at: BTreeMap<DateHour, Predictors> =
        observed.iter().map(|r| (r.timestamp, r.predictors)).collect();
    let forecast_at: BTreeMap<(DateHour, u8), Predictors> = forecasts
        .iter()
        .map(|r| ((r.valid_time, r.horizon_days), r.predictors))
        .collect();

    let mut samples = Vec::new();
    let mut dropped_no_observed = 0usize;
    for peak in peaks {
        let key = DateHour { date: peak.date, hour: peak.peak_hour };
        let Some(observed) = observed_at.get(&key).copied() else {
            dropped_no_observed += 1;
            continue;
        };
        let mut horizon_vectors = [None; MAX_HORIZON as usize];
        for (d, slot) in horizon_vectors.iter_mut().enumerate() {
            *slot = forecast_at.get(&(key, d as u8 + 1)).copied();
        }
        samples.push(PeakSample {
            date: peak.date,
            peak_hour: peak.peak_hour,
            target: peak.energy,
            observed,
            forecasts: horizon_vectors,
        });
    }
    Alignment { samples, dropped_no_observed }
}
