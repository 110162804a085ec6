//! Report documents and their CSV/JSON renderings.
//!
//! Floats are written with Rust's shortest-roundtrip formatting, so files
//! are byte-identical across runs and parse back to the exact values that
//! produced them.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use peakcast_core::selection::{BicForm, SubsetScore};
use peakcast_core::uncertainty::HorizonErrorStats;
use peakcast_core::{Error as CoreError, Predictor, PredictorSet};
use serde::Serialize;

use crate::dataset::MAX_HORIZON;
use crate::error::PipelineError;
use crate::time::Date;

pub const REPORT_SCHEMA: &str = "peakcast.report.v1";

/// MAPE and sample count for one model on one evaluation source.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalCell {
    pub n_samples: usize,
    pub mape: f64,
}

/// Per-model results of a `run` command.
#[derive(Debug, Clone, Serialize)]
pub struct ModelReport {
    pub model: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// MAPE on observed predictors over the evaluation set.
    pub training: Option<EvalCell>,
    /// MAPE per horizon 1..6 (index d−1); `None` where no samples exist.
    pub horizons: Vec<Option<EvalCell>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema: &'static str,
    pub predictors: PredictorSet,
    pub n_samples: usize,
    pub n_train: usize,
    pub n_eval: usize,
    pub dropped_no_observed: usize,
    pub holdout_fraction: f64,
    pub models: Vec<ModelReport>,
}

/// One line of the per-sample prediction dump.
#[derive(Debug, Clone)]
pub struct AuditRow {
    pub model: String,
    /// `observed` or `d1`..`d6`.
    pub source: String,
    pub date: Date,
    pub peak_hour: u8,
    pub target: f64,
    pub prediction: f64,
}

#[derive(Debug, Serialize)]
pub struct SubsetReport {
    pub schema: &'static str,
    pub bic_form: BicForm,
    pub n_samples: usize,
    /// All 15 rows, sorted by training RMSE; failed fits carry an error.
    pub rows: Vec<SubsetRow>,
    /// Winning subset per criterion (max for rbar2, min otherwise).
    pub best_by: BTreeMap<&'static str, String>,
}

#[derive(Debug, Serialize)]
pub struct SubsetRow {
    pub subset: String,
    #[serde(flatten, skip_serializing_if = "Option::is_none")]
    pub scores: Option<SubsetScores>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct SubsetScores {
    pub rmse: f64,
    pub rbar2: f64,
    pub aic: f64,
    pub aicc: f64,
    pub bic: f64,
    pub cv: f64,
    pub sse: f64,
}

impl SubsetReport {
    pub fn new(
        n_samples: usize,
        bic_form: BicForm,
        rows: &[(PredictorSet, Result<SubsetScore, CoreError>)],
        best: &BTreeMap<&'static str, PredictorSet>,
    ) -> Self {
        let mut ordered: Vec<&(PredictorSet, Result<SubsetScore, CoreError>)> = rows.iter().collect();
        ordered.sort_by(|a, b| match (&a.1, &b.1) {
            (Ok(x), Ok(y)) => x.rmse.total_cmp(&y.rmse),
            (Ok(_), Err(_)) => core::cmp::Ordering::Less,
            (Err(_), Ok(_)) => core::cmp::Ordering::Greater,
            (Err(_), Err(_)) => a.0.cmp(&b.0),
        });
        SubsetReport {
            schema: REPORT_SCHEMA,
            bic_form,
            n_samples,
            rows: ordered
                .into_iter()
                .map(|(subset, result)| match result {
                    Ok(s) => SubsetRow {
                        subset: subset.label(),
                        scores: Some(SubsetScores {
                            rmse: s.rmse,
                            rbar2: s.rbar2,
                            aic: s.aic,
                            aicc: s.aicc,
                            bic: s.bic,
                            cv: s.cv,
                            sse: s.sse,
                        }),
                        error: None,
                    },
                    Err(e) => SubsetRow {
                        subset: subset.label(),
                        scores: None,
                        error: Some(e.to_string()),
                    },
                })
                .collect(),
            best_by: best.iter().map(|(k, v)| (*k, v.label())).collect(),
        }
    }

    /// One CSV row per scored subset, sorted by training RMSE.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("subset,rmse,rbar2,aic,aicc,bic,cv\n");
        for row in &self.rows {
            if let Some(s) = &row.scores {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    row.subset, s.rmse, s.rbar2, s.aic, s.aicc, s.bic, s.cv
                ));
            }
        }
        out
    }
}

#[derive(Debug, Serialize)]
pub struct WeatherErrorReport {
    pub schema: &'static str,
    pub b: u32,
    pub seed: u64,
    pub variables: Vec<VariableErrors>,
}

#[derive(Debug, Serialize)]
pub struct VariableErrors {
    /// Symbol S, D, R, or T.
    pub variable: char,
    pub name: Predictor,
    /// Index d−1 holds horizon d; `None` where no pairs exist.
    pub horizons: Vec<Option<HorizonErrorStats>>,
}

impl WeatherErrorReport {
    pub fn new(
        b: u32,
        seed: u64,
        per_variable: Vec<(Predictor, Vec<Option<HorizonErrorStats>>)>,
    ) -> Self {
        WeatherErrorReport {
            schema: REPORT_SCHEMA,
            b,
            seed,
            variables: per_variable
                .into_iter()
                .map(|(p, horizons)| VariableErrors { variable: p.symbol(), name: p, horizons })
                .collect(),
        }
    }

    /// Error-statistics CSV, one row per variable and horizon.
    /// `mae_boot_std` is the bootstrap spread of the
    /// MAE estimate; `err_std` is the absolute-error population spread.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "variable,horizon,n_pairs,bias,mae_mean,mae_boot_std,err_std,ci_low,ci_high\n",
        );
        for v in &self.variables {
            for entry in v.horizons.iter().flatten() {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{}\n",
                    v.variable,
                    entry.horizon,
                    entry.n_pairs,
                    entry.bias,
                    entry.mae.point,
                    entry.mae.boot_std,
                    entry.abs_error_std.point,
                    entry.mae.ci_low,
                    entry.mae.ci_high,
                ));
            }
        }
        out
    }

    /// Confidence-interval plot data: one row per variable × horizon × statistic
    /// with the full bootstrap summary.
    pub fn to_ci_csv(&self) -> String {
        let mut out = String::from("variable,horizon,statistic,point,boot_std,ci_low,ci_high\n");
        for v in &self.variables {
            for entry in v.horizons.iter().flatten() {
                for (name, s) in [("mean", &entry.mae), ("std", &entry.abs_error_std)] {
                    out.push_str(&format!(
                        "{},{},{},{},{},{},{}\n",
                        v.variable, entry.horizon, name, s.point, s.boot_std, s.ci_low, s.ci_high,
                    ));
                }
            }
        }
        out
    }
}

impl RunReport {
    /// Plot-data CSV: horizon 0 is the observed-predictor evaluation.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("model,horizon,n_samples,mape\n");
        for m in &self.models {
            if let Some(cell) = &m.training {
                out.push_str(&format!("{},0,{},{}\n", m.model, cell.n_samples, cell.mape));
            }
            for (d, cell) in m.horizons.iter().enumerate() {
                if let Some(cell) = cell {
                    out.push_str(&format!(
                        "{},{},{},{}\n",
                        m.model,
                        d + 1,
                        cell.n_samples,
                        cell.mape
                    ));
                }
            }
        }
        out
    }
}

pub fn predictions_audit_csv(rows: &[AuditRow]) -> String {
    let mut out = String::from("model,source,date,peak_hour,target,prediction\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.model, r.source, r.date, r.peak_hour, r.target, r.prediction
        ));
    }
    out
}

/// The audit source label for a horizon; 0 means observed predictors.
pub fn source_label(horizon: usize) -> String {
    if horizon == 0 {
        "observed".to_string()
    } else {
        debug_assert!(horizon <= MAX_HORIZON as usize);
        format!("d{horizon}")
    }
}

pub fn write_text(path: &Path, content: &str) -> Result<(), PipelineError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)
            .map_err(|source| PipelineError::Io { path: parent.to_path_buf(), source })?;
    }
    fs::write(path, content).map_err(|source| PipelineError::Io { path: path.to_path_buf(), source })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), PipelineError> {
    let mut body = serde_json::to_string_pretty(value)
        .map_err(|e| PipelineError::Config(format!("cannot serialize report: {e}")))?;
    body.push('\n');
    write_text(path, &body)
}

#[cfg(test)]
mod tests {
    use super::*;
    use peakcast_core::selection::Criterion;

    #[test]
    fn subset_csv_sorted_by_rmse_and_skips_failed_rows() {
        let good = SubsetScore {
            subset: PredictorSet::parse("D").unwrap(),
            rmse: 2.0,
            rbar2: 0.5,
            aic: 10.0,
            aicc: 11.0,
            bic: 12.0,
            cv: 4.0,
            sse: 40.0,
        };
        let better = SubsetScore {
            subset: PredictorSet::parse("DT").unwrap(),
            rmse: 1.0,
            ..good.clone()
        };
        let rows = vec![
            (good.subset, Ok(good.clone())),
            (PredictorSet::parse("S").unwrap(), Err(CoreError::SingularMatrix)),
            (better.subset, Ok(better.clone())),
        ];
        let mut best = BTreeMap::new();
        best.insert(Criterion::Rmse.name(), better.subset);
        let report = SubsetReport::new(30, BicForm::Printed, &rows, &best);
        let csv = report.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "subset,rmse,rbar2,aic,aicc,bic,cv");
        assert!(lines[1].starts_with("DT,1,"));
        assert!(lines[2].starts_with("D,2,"));
        assert_eq!(lines.len(), 3);
        assert_eq!(report.rows.last().unwrap().subset, "S");
        assert!(report.rows.last().unwrap().error.is_some());
    }

    #[test]
    fn audit_csv_floats_roundtrip() {
        let rows = vec![AuditRow {
            model: "MLR".into(),
            source: "d3".into(),
            date: Date::new(2016, 5, 2).unwrap(),
            peak_hour: 12,
            target: 71.3000000000001,
            prediction: 0.1 + 0.2,
        }];
        let csv = predictions_audit_csv(&rows);
        let line = csv.lines().nth(1).unwrap();
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields[2], "2016-05-02");
        assert_eq!(fields[4].parse::<f64>().unwrap().to_bits(), rows[0].target.to_bits());
        assert_eq!(fields[5].parse::<f64>().unwrap().to_bits(), rows[0].prediction.to_bits());
    }
}
