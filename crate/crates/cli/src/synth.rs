//! Deterministic synthetic weather/energy generator.
//!
//! Produces the three CSV inputs for a self-contained experiment. Daily
//! weather is drawn once per day (sky cover lands on one of the five
//! category percents so the observed file can carry the categorical
//! labels, exactly as real observed data does); hourly energy follows a
//! half-cosine bell that peaks at noon with the peak value given by the
//! configured affine map of the predictors. Forecasts at horizon d equal
//! the observed value minus the configured bias plus N(0, σ_d²) noise,
//! so the reported Bias converges to the configured one.
//!
//! Draw order is fixed (three substreams: daily weather, forecast noise,
//! target noise), so a seed pins every file byte-for-byte.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use peakcast_core::rng::{substream, SplitMix64};
use peakcast_core::Predictors;

use crate::config::SynthConfig;
use crate::dataset::{
    sky_cover_label, EnergyRecord, ForecastRecord, WeatherRecord, ENERGY_HEADER,
    FORECAST_HEADER, MAX_HORIZON, OBSERVED_HEADER,
};
use crate::error::PipelineError;
use crate::time::DateHour;

/// Hours with nonzero generation; the bell is cos(π(h−12)/12).
const FIRST_SUN_HOUR: u8 = 7;
const LAST_SUN_HOUR: u8 = 17;

const SKY_CATEGORIES: [f64; 5] = [0.0, 25.0, 50.0, 75.0, 100.0];

#[derive(Debug, Clone)]
pub struct SynthData {
    pub observed: Vec<WeatherRecord>,
    pub forecasts: Vec<ForecastRecord>,
    pub energy: Vec<EnergyRecord>,
}

/// Generate one record set from the configuration.
pub fn generate(config: &SynthConfig) -> Result<SynthData, PipelineError> {
    if config.days == 0 {
        return Err(PipelineError::Config("`synthetic.days` must be positive".into()));
    }
    if config.noise_std.len() != MAX_HORIZON as usize {
        return Err(PipelineError::Config(
            "`synthetic.noise_std` needs exactly 6 entries (horizons 1..6)".into(),
        ));
    }

    let mut weather_rng = SplitMix64::new(substream(config.seed, 0));
    let mut noise_rng = SplitMix64::new(substream(config.seed, 1));
    let mut target_rng = SplitMix64::new(substream(config.seed, 2));

    let coeffs = &config.coefficients;
    let bias = &config.bias;

    let mut observed = Vec::new();
    let mut forecasts = Vec::new();
    let mut energy = Vec::new();

    let mut date = config.start;
    for _ in 0..config.days {
        let vars = Predictors {
            sky_cover: SKY_CATEGORIES[weather_rng.next_index(SKY_CATEGORIES.len())],
            dew_point: weather_rng.next_range(40.0, 70.0),
            rel_humidity: weather_rng.next_range(25.0, 85.0),
            temperature: weather_rng.next_range(55.0, 90.0),
        };
        let peak = coeffs.intercept
            + coeffs.sky_cover * vars.sky_cover
            + coeffs.dew_point * vars.dew_point
            + coeffs.rel_humidity * vars.rel_humidity
            + coeffs.temperature * vars.temperature
            + config.target_noise_std * target_rng.next_normal();

        for hour in 0u8..24 {
            let timestamp = DateHour { date, hour };
            observed.push(WeatherRecord { timestamp, predictors: vars });
            let bell = if (FIRST_SUN_HOUR..=LAST_SUN_HOUR).contains(&hour) {
                (PI * (hour as f64 - 12.0) / 12.0).cos()
            } else {
                0.0
            };
            energy.push(EnergyRecord { timestamp, energy: (peak * bell).max(0.0) });

            for (d, sigma) in config.noise_std.iter().enumerate() {
                let mut forecast = |value: f64, shift: f64| value - shift + sigma * noise_rng.next_normal();
                let predictors = Predictors {
                    sky_cover: forecast(vars.sky_cover, bias.sky_cover).clamp(0.0, 100.0),
                    dew_point: forecast(vars.dew_point, bias.dew_point),
                    rel_humidity: forecast(vars.rel_humidity, bias.rel_humidity).clamp(0.0, 100.0),
                    temperature: forecast(vars.temperature, bias.temperature),
                };
                forecasts.push(ForecastRecord {
                    valid_time: timestamp,
                    horizon_days: d as u8 + 1,
                    predictors,
                });
            }
        }
        date = date.succ();
    }

    Ok(SynthData { observed, forecasts, energy })
}

/// Write the three CSVs into `dir` as `observed.csv`, `forecast.csv`, and
/// `energy.csv`. Observed sky cover is written as its categorical label.
pub fn write_csvs(data: &SynthData, dir: &Path) -> Result<[PathBuf; 3], PipelineError> {
    fs::create_dir_all(dir).map_err(|source| PipelineError::Io { path: dir.to_path_buf(), source })?;

    let mut observed = String::from(OBSERVED_HEADER);
    observed.push('\n');
    for r in &data.observed {
        let sky = sky_cover_label(r.predictors.sky_cover)
            .map(str::to_string)
            .unwrap_or_else(|| format!("{}", r.predictors.sky_cover));
        observed.push_str(&format!(
            "{},{},{},{},{}\n",
            r.timestamp, sky, r.predictors.dew_point, r.predictors.rel_humidity,
            r.predictors.temperature,
        ));
    }

    let mut forecast = String::from(FORECAST_HEADER);
    forecast.push('\n');
    for r in &data.forecasts {
        forecast.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.valid_time, r.horizon_days, r.predictors.sky_cover, r.predictors.dew_point,
            r.predictors.rel_humidity, r.predictors.temperature,
        ));
    }

    let mut energy = String::from(ENERGY_HEADER);
    energy.push('\n');
    for r in &data.energy {
        energy.push_str(&format!("{},{}\n", r.timestamp, r.energy));
    }

    let paths = [dir.join("observed.csv"), dir.join("forecast.csv"), dir.join("energy.csv")];
    for (path, content) in paths.iter().zip([observed, forecast, energy]) {
        fs::write(path, content)
            .map_err(|source| PipelineError::Io { path: path.clone(), source })?;
    }
    Ok(paths)
}
