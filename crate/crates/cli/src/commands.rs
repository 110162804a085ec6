//! The four pipeline commands: `synth`, `select`, `weather-error`, `run`.

use std::collections::BTreeMap;
use std::path::PathBuf;

use peakcast_core::metrics::{self, PairedSeries};
use peakcast_core::models::{self, FittedModel};
use peakcast_core::rng::substream;
use peakcast_core::selection::{best_subset, score_all_subsets, Criterion, SubsetScore};
use peakcast_core::uncertainty::horizon_error_stats;
use peakcast_core::{Error as CoreError, Predictor, Predictors, PredictorSet};

use crate::config::{ExperimentConfig, ModelConfig};
use crate::dataset::{
    self, align, extract_daily_peaks, hourly_error_pairs, EnergyRecord, ForecastRecord,
    PeakSample, WeatherRecord, MAX_HORIZON,
};
use crate::error::PipelineError;
use crate::report::{
    predictions_audit_csv, source_label, write_json, write_text, AuditRow, EvalCell,
    ModelReport, RunReport, SubsetReport, WeatherErrorReport, REPORT_SCHEMA,
};
use crate::synth;

/// Generate the three synthetic CSVs into the output directory.
pub fn cmd_synth(config: &ExperimentConfig) -> Result<[PathBuf; 3], PipelineError> {
    let Some(synth_config) = &config.synthetic else {
        return Err(PipelineError::Config("the synth command needs a `synthetic` block".into()));
    };
    let data = synth::generate(synth_config)?;
    let paths = synth::write_csvs(&data, config.output_dir()?)?;
    println!(
        "wrote {} observed, {} forecast, {} energy rows",
        data.observed.len(),
        data.forecasts.len(),
        data.energy.len()
    );
    for path in &paths {
        println!("  {}", path.display());
    }
    Ok(paths)
}

struct Records {
    observed: Vec<WeatherRecord>,
    forecasts: Vec<ForecastRecord>,
    energy: Vec<EnergyRecord>,
}

fn load_records(config: &ExperimentConfig) -> Result<Records, PipelineError> {
    if let Some(inputs) = &config.inputs {
        Ok(Records {
            observed: dataset::parse_observed_csv(&inputs.observed_csv)?,
            forecasts: dataset::parse_forecast_csv(&inputs.forecast_csv)?,
            energy: dataset::parse_energy_csv(&inputs.energy_csv)?,
        })
    } else if let Some(synth_config) = &config.synthetic {
        let data = synth::generate(synth_config)?;
        Ok(Records { observed: data.observed, forecasts: data.forecasts, energy: data.energy })
    } else {
        Err(PipelineError::Config("provide one of `inputs` or `synthetic`".into()))
    }
}

fn aligned_samples(records: &Records) -> (Vec<PeakSample>, usize) {
    let peaks = extract_daily_peaks(&records.energy);
    let alignment = align(&peaks, &records.observed, &records.forecasts);
    if alignment.dropped_no_observed > 0 {
        eprintln!(
            "note: dropped {} peak day(s) lacking an observed record at the peak hour",
            alignment.dropped_no_observed
        );
    }
    (alignment.samples, alignment.dropped_no_observed)
}

/// Score all 15 predictor subsets and write the subset-score report.
pub fn cmd_select(config: &ExperimentConfig) -> Result<SubsetReport, PipelineError> {
    let records = load_records(config)?;
    let (samples, _) = aligned_samples(&records);
    let observed: Vec<Predictors> = samples.iter().map(|s| s.observed).collect();
    let targets: Vec<f64> = samples.iter().map(|s| s.target).collect();

    let rows = score_all_subsets(&observed, &targets, config.predictors, config.bic_form)?;
    for (subset, result) in &rows {
        if let Err(e) = result {
            eprintln!("subset {subset}: {e}");
        }
    }
    let scored: Vec<SubsetScore> = rows.iter().filter_map(|(_, r)| r.clone().ok()).collect();
    let mut best = BTreeMap::new();
    for criterion in Criterion::ALL {
        if let Some(subset) = best_subset(&scored, criterion) {
            best.insert(criterion.name(), subset);
        }
    }

    let report = SubsetReport::new(samples.len(), config.bic_form, &rows, &best);
    let out = config.output_dir()?;
    write_text(&out.join("subset_scores.csv"), &report.to_csv())?;
    write_json(&out.join("subset_scores.json"), &report)?;
    for (criterion, label) in &report.best_by {
        println!("best by {criterion}: {label}");
    }
    Ok(report)
}

/// Bootstrap forecast-error statistics per variable and horizon.
pub fn cmd_weather_error(config: &ExperimentConfig) -> Result<WeatherErrorReport, PipelineError> {
    let records = load_records(config)?;
    let b = config.bootstrap.b;
    let seed = config.bootstrap.seed;

    let mut per_variable = Vec::new();
    for (index, variable) in Predictor::ALL.into_iter().enumerate() {
        let pairs = hourly_error_pairs(&records.observed, &records.forecasts, variable);
        let stats = horizon_error_stats(&pairs, b, substream(seed, index as u64))?;
        per_variable.push((variable, stats));
    }

    let report = WeatherErrorReport::new(b, seed, per_variable);
    let out = config.output_dir()?;
    write_text(&out.join("weather_error.csv"), &report.to_csv())?;
    write_json(&out.join("weather_error.json"), &report)?;
    write_text(&out.join("weather_error_ci.csv"), &report.to_ci_csv())?;

    for v in &report.variables {
        let maes: Vec<String> = v
            .horizons
            .iter()
            .map(|h| match h {
                Some(s) => format!("{:.3}", s.mae.point),
                None => "-".to_string(),
            })
            .collect();
        println!("{} MAE by horizon: {}", v.variable, maes.join(" "));
    }
    Ok(report)
}

/// Train every configured model on observed predictors and evaluate its
/// MAPE on observed predictors and on each forecast horizon.
pub fn cmd_run(config: &ExperimentConfig) -> Result<RunReport, PipelineError> {
    let records = load_records(config)?;
    let (samples, dropped_no_observed) = aligned_samples(&records);
    if samples.is_empty() {
        return Err(PipelineError::Config("no aligned samples to train on".into()));
    }
    let subset = config.predictors;
    let n = samples.len();
    let n_holdout = (config.holdout_fraction * n as f64).round() as usize;
    let (train, eval): (&[PeakSample], &[PeakSample]) = if n_holdout > 0 {
        (&samples[..n - n_holdout], &samples[n - n_holdout..])
    } else {
        (&samples[..], &samples[..])
    };

    // Models only ever see observed predictors at training time; forecast
    // vectors enter at evaluation alone.
    let train_rows = observed_rows(train, subset);
    let train_targets: Vec<f64> = train.iter().map(|s| s.target).collect();

    let out = config.output_dir()?;
    let labels = model_labels(&config.models);
    let mut model_reports = Vec::new();
    let mut audit = Vec::new();
    let mut first_failure: Option<CoreError> = None;
    let mut any_ok = false;

    for (model_config, label) in config.models.iter().zip(&labels) {
        let spec = model_config.resolve(subset.len());
        match models::fit(&spec, &train_rows, &train_targets) {
            Ok(model) => {
                any_ok = true;
                let stem = label.to_lowercase().replace('-', "_");
                write_text(
                    &out.join("models").join(format!("{stem}.json")),
                    &format!("{}\n", model.to_json()),
                )?;
                let (training, horizons) = evaluate_model(&model, label, eval, subset, &mut audit)?;
                model_reports.push(ModelReport {
                    model: label.clone(),
                    error: None,
                    training,
                    horizons,
                });
            }
            Err(e) => {
                eprintln!("{label}: fit failed: {e}");
                if first_failure.is_none() {
                    first_failure = Some(e.clone());
                }
                model_reports.push(ModelReport {
                    model: label.clone(),
                    error: Some(e.to_string()),
                    training: None,
                    horizons: vec![None; MAX_HORIZON as usize],
                });
            }
        }
    }
    if !any_ok {
        return Err(PipelineError::Numeric(
            first_failure.expect("at least one model configured"),
        ));
    }

    let report = RunReport {
        schema: REPORT_SCHEMA,
        predictors: subset,
        n_samples: n,
        n_train: train.len(),
        n_eval: eval.len(),
        dropped_no_observed,
        holdout_fraction: config.holdout_fraction,
        models: model_reports,
    };
    write_text(&out.join("mape_by_horizon.csv"), &report.to_csv())?;
    write_json(&out.join("mape_by_horizon.json"), &report)?;
    write_text(&out.join("predictions_audit.csv"), &predictions_audit_csv(&audit))?;

    for m in &report.models {
        match (&m.training, &m.error) {
            (Some(cell), _) => {
                let horizon_mapes: Vec<String> = m
                    .horizons
                    .iter()
                    .map(|h| match h {
                        Some(c) => format!("{:.3}", c.mape),
                        None => "-".to_string(),
                    })
                    .collect();
                println!(
                    "{}: training MAPE {:.3}%, by horizon: {}",
                    m.model,
                    cell.mape,
                    horizon_mapes.join(" ")
                );
            }
            (None, Some(e)) => println!("{}: failed ({e})", m.model),
            (None, None) => {}
        }
    }
    Ok(report)
}

fn observed_rows(samples: &[PeakSample], subset: PredictorSet) -> Vec<Vec<f64>> {
    samples.iter().map(|s| s.observed.select(subset)).collect()
}

fn evaluate_model(
    model: &FittedModel,
    label: &str,
    eval: &[PeakSample],
    subset: PredictorSet,
    audit: &mut Vec<AuditRow>,
) -> Result<(Option<EvalCell>, Vec<Option<EvalCell>>), PipelineError> {
    let training = evaluate_source(model, label, eval, subset, 0, audit)?;
    let mut horizons = Vec::with_capacity(MAX_HORIZON as usize);
    for horizon in 1..=MAX_HORIZON as usize {
        horizons.push(evaluate_source(model, label, eval, subset, horizon, audit)?);
    }
    Ok((training, horizons))
}

fn evaluate_source(
    model: &FittedModel,
    label: &str,
    samples: &[PeakSample],
    subset: PredictorSet,
    horizon: usize,
    audit: &mut Vec<AuditRow>,
) -> Result<Option<EvalCell>, PipelineError> {
    let source = source_label(horizon);
    let mut targets = Vec::new();
    let mut predictions = Vec::new();
    for sample in samples {
        let row = if horizon == 0 {
            Some(sample.observed.select(subset))
        } else {
            sample.forecast(horizon as u8).map(|p| p.select(subset))
        };
        let Some(row) = row else { continue };
        let prediction = model.predict(&row)?;
        audit.push(AuditRow {
            model: label.to_string(),
            source: source.clone(),
            date: sample.date,
            peak_hour: sample.peak_hour,
            target: sample.target,
            prediction,
        });
        targets.push(sample.target);
        predictions.push(prediction);
    }
    if targets.is_empty() {
        return Ok(None);
    }
    let mape = metrics::mape(&PairedSeries::new(&targets, &predictions)?)?;
    Ok(Some(EvalCell { n_samples: targets.len(), mape }))
}

/// Report labels for the configured models; duplicate kinds get an
/// occurrence suffix (`QR-1`, `QR-2`).
fn model_labels(models: &[ModelConfig]) -> Vec<String> {
    let mut totals: BTreeMap<&str, usize> = BTreeMap::new();
    for model in models {
        *totals.entry(model.kind_label()).or_default() += 1;
    }
    let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
    models
        .iter()
        .map(|model| {
            let label = model.kind_label();
            let occurrence = seen.entry(label).or_default();
            *occurrence += 1;
            if totals[label] > 1 {
                format!("{label}-{occurrence}")
            } else {
                label.to_string()
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicate_model_kinds_get_distinct_labels() {
        let models = vec![
            ModelConfig::Mlr,
            ModelConfig::Qr { tau: 0.25 },
            ModelConfig::Qr { tau: 0.75 },
        ];
        assert_eq!(model_labels(&models), vec!["MLR", "QR-1", "QR-2"]);
    }

    #[test]
    fn observed_rows_use_only_the_observed_vector() {
        use crate::time::Date;
        let date = Date::new(2016, 6, 1).unwrap();
        let observed = Predictors { sky_cover: 1.0, dew_point: 2.0, rel_humidity: 3.0, temperature: 4.0 };
        let forecast = Predictors { sky_cover: 9.0, dew_point: 9.0, rel_humidity: 9.0, temperature: 9.0 };
        let sample = PeakSample {
            date,
            peak_hour: 12,
            target: 10.0,
            observed,
            forecasts: [Some(forecast); 6],
        };
        let rows = observed_rows(&[sample], PredictorSet::FULL);
        assert_eq!(rows, vec![vec![1.0, 2.0, 3.0, 4.0]]);
    }
}
