//! Cross-module invariants, mostly property-based.

use peakcast_core::metrics::{self, PairedSeries};
use peakcast_core::models::{
    self, fit_mlr, pinball_loss, AnnSpec, FittedModel, Kernel, ModelParams, RegressorSpec,
    SvrParams, WeightMode,
};
use peakcast_core::rng::SplitMix64;
use peakcast_core::selection::{score_all_subsets, BicForm};
use peakcast_core::uncertainty::{bootstrap, Statistic};
use peakcast_core::{DesignMatrix, PredictorSet, Predictors};
use proptest::prelude::*;

fn paired(max_len: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    prop::collection::vec(
        ((-1e6..1e6f64), (-1e6..1e6f64)),
        1..max_len,
    )
    .prop_map(|pairs| pairs.into_iter().unzip())
}

proptest! {
    #[test]
    fn mae_bounded_by_rmse_and_bias_by_mae((y, yhat) in paired(64)) {
        let p = PairedSeries::new(&y, &yhat).unwrap();
        let mae = metrics::mae(&p);
        let rmse = metrics::rmse(&p);
        let bias = metrics::bias(&p);
        prop_assert!(mae <= rmse * (1.0 + 1e-12) + 1e-12, "mae {mae} rmse {rmse}");
        prop_assert!(bias.abs() <= mae * (1.0 + 1e-12) + 1e-12, "bias {bias} mae {mae}");
    }

    #[test]
    fn metrics_permutation_invariant((y, yhat) in paired(32), rot in 0usize..31) {
        let p = PairedSeries::new(&y, &yhat).unwrap();
        let k = rot % y.len();
        let mut y2 = y.clone();
        let mut yhat2 = yhat.clone();
        y2.rotate_left(k);
        yhat2.rotate_left(k);
        let q = PairedSeries::new(&y2, &yhat2).unwrap();
        prop_assert!((metrics::mae(&p) - metrics::mae(&q)).abs() < 1e-9);
        prop_assert!((metrics::rmse(&p) - metrics::rmse(&q)).abs() < 1e-9);
        prop_assert!((metrics::bias(&p) - metrics::bias(&q)).abs() < 1e-9);
    }

    #[test]
    fn mape_invariant_under_joint_positive_scaling(
        pairs in prop::collection::vec(((0.1..1e4f64), (-1e4..1e4f64)), 1..32),
        scale in 0.01..100.0f64,
    ) {
        let (y, yhat): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let p = PairedSeries::new(&y, &yhat).unwrap();
        let ys: Vec<f64> = y.iter().map(|v| v * scale).collect();
        let yhats: Vec<f64> = yhat.iter().map(|v| v * scale).collect();
        let q = PairedSeries::new(&ys, &yhats).unwrap();
        let a = metrics::mape(&p).unwrap();
        let b = metrics::mape(&q).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0), "{a} vs {b}");
    }

    #[test]
    fn bootstrap_deterministic_and_mean_ci_in_sample_range(
        sample in prop::collection::vec(-1e3..1e3f64, 1..64),
        seed in any::<u64>(),
    ) {
        let a = bootstrap(&sample, Statistic::Mean, 64, seed).unwrap();
        let b = bootstrap(&sample, Statistic::Mean, 64, seed).unwrap();
        prop_assert_eq!(&a, &b);
        let lo = sample.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = sample.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(a.ci_low >= lo - 1e-12 && a.ci_high <= hi + 1e-12);
        prop_assert!(a.ci_low <= a.ci_high);
    }
}

fn synthetic(n: usize, seed: u64, noise: f64) -> (Vec<Predictors>, Vec<f64>) {
    let mut rng = SplitMix64::new(seed);
    let samples: Vec<Predictors> = (0..n)
        .map(|_| Predictors {
            sky_cover: rng.next_range(0.0, 100.0),
            dew_point: rng.next_range(40.0, 70.0),
            rel_humidity: rng.next_range(20.0, 90.0),
            temperature: rng.next_range(50.0, 95.0),
        })
        .collect();
    let target: Vec<f64> = samples
        .iter()
        .map(|s| {
            55.0 - 0.3 * s.sky_cover + 0.12 * s.dew_point - 0.05 * s.rel_humidity
                + 0.4 * s.temperature
                + noise * rng.next_normal()
        })
        .collect();
    (samples, target)
}

#[test]
fn adding_a_predictor_never_increases_sse() {
    for seed in [1u64, 5, 9] {
        let (samples, target) = synthetic(45, seed, 3.0);
        let rows =
            score_all_subsets(&samples, &target, PredictorSet::FULL, BicForm::Printed).unwrap();
        let scored: Vec<_> = rows
            .into_iter()
            .map(|(set, result)| (set, result.unwrap()))
            .collect();
        for (small, small_score) in &scored {
            for (big, big_score) in &scored {
                if small.is_subset_of(*big) {
                    assert!(
                        big_score.sse <= small_score.sse * (1.0 + 1e-9) + 1e-9,
                        "seed {seed}: sse({big}) = {} > sse({small}) = {}",
                        big_score.sse,
                        small_score.sse
                    );
                }
            }
        }
    }
}

#[test]
fn aicc_at_least_aic_with_equality_only_for_no_predictors() {
    let (samples, target) = synthetic(30, 3, 2.0);
    let rows = score_all_subsets(&samples, &target, PredictorSet::FULL, BicForm::Printed).unwrap();
    for (set, result) in rows {
        let score = result.unwrap();
        assert!(score.aicc >= score.aic, "{set}");
        assert!(score.aicc > score.aic, "{set} has k >= 1 so the correction is positive");
    }
}

#[test]
fn median_regression_beats_least_squares_on_pinball_loss() {
    for seed in [2u64, 4, 8, 16] {
        let mut rng = SplitMix64::new(seed);
        let rows: Vec<Vec<f64>> = (0..35)
            .map(|_| vec![rng.next_range(-5.0, 5.0), rng.next_range(0.0, 3.0)])
            .collect();
        let y: Vec<f64> = rows
            .iter()
            .map(|r| 1.0 + 2.0 * r[0] - r[1] + rng.next_normal().powi(3))
            .collect();
        let x = DesignMatrix::from_rows(&rows).unwrap();

        let qr = models::fit(&RegressorSpec::Qr { tau: 0.5 }, &rows, &y).unwrap();
        let mlr = fit_mlr(&x, &y).unwrap();
        let loss = |model: &FittedModel| {
            let residuals: Vec<f64> = rows
                .iter()
                .zip(&y)
                .map(|(row, target)| target - model.predict(row).unwrap())
                .collect();
            pinball_loss(0.5, &residuals)
        };
        let qr_loss = loss(&qr);
        let mlr_loss = loss(&mlr);
        assert!(
            qr_loss <= mlr_loss * (1.0 + 1e-9) + 1e-9,
            "seed {seed}: pinball(QR) = {qr_loss} > pinball(MLR) = {mlr_loss}"
        );
    }
}

#[test]
fn every_model_kind_roundtrips_through_json() {
    let mut rng = SplitMix64::new(21);
    let rows: Vec<Vec<f64>> = (0..25)
        .map(|_| vec![rng.next_range(0.0, 10.0), rng.next_range(-2.0, 2.0)])
        .collect();
    let y: Vec<f64> = rows
        .iter()
        .map(|r| 3.0 + r[0] - 0.5 * r[1] + 0.2 * rng.next_normal())
        .collect();

    let specs = [
        RegressorSpec::Mlr,
        RegressorSpec::Qr { tau: 0.5 },
        RegressorSpec::Svr(SvrParams {
            kernel: Kernel::Rbf { gamma: 0.5 },
            ..SvrParams::default()
        }),
        RegressorSpec::Ann(AnnSpec { hidden_neurons: 3, max_epochs: 15, seed: 5 }),
        RegressorSpec::Ensemble {
            members: vec![RegressorSpec::Mlr, RegressorSpec::Qr { tau: 0.5 }],
            weights: WeightMode::Optimized,
        },
    ];
    let probe = [4.2, 1.1];
    for spec in &specs {
        let model = models::fit(spec, &rows, &y).unwrap();
        let reloaded = FittedModel::from_json(&model.to_json()).unwrap();
        assert_eq!(reloaded, model, "{:?}", spec.kind());
        assert_eq!(
            reloaded.predict(&probe).unwrap().to_bits(),
            model.predict(&probe).unwrap().to_bits(),
            "{:?}",
            spec.kind()
        );
    }
}

#[test]
fn fits_are_deterministic_given_seed() {
    let (samples, target) = synthetic(40, 77, 1.5);
    let rows: Vec<Vec<f64>> = samples.iter().map(|s| s.select(PredictorSet::FULL)).collect();
    let spec = RegressorSpec::Ensemble {
        members: vec![
            RegressorSpec::Mlr,
            RegressorSpec::Svr(SvrParams::default()),
            RegressorSpec::Ann(AnnSpec { hidden_neurons: 5, max_epochs: 20, seed: 3 }),
        ],
        weights: WeightMode::Optimized,
    };
    let a = models::fit(&spec, &rows, &target).unwrap();
    let b = models::fit(&spec, &rows, &target).unwrap();
    assert_eq!(a, b);
}

#[test]
fn svr_inside_tube_certificates() {
    let mut rng = SplitMix64::new(13);
    let rows: Vec<Vec<f64>> = (0..30).map(|_| vec![rng.next_range(-3.0, 3.0)]).collect();
    let y: Vec<f64> = rows.iter().map(|r| 0.5 * r[0] + 0.05 * rng.next_normal()).collect();
    let params = SvrParams { c: 5.0, epsilon: 0.2, tol: 1e-6, ..SvrParams::default() };
    let model = models::fit_svr(&rows, &y, &params).unwrap();
    let ModelParams::Svr { dual_coefficients, support_vectors, .. } = &model.params else {
        unreachable!()
    };
    // interior-tube training points carry no dual weight
    for (row, target) in rows.iter().zip(&y) {
        let pred = model.predict(row).unwrap();
        if (pred - target).abs() < params.epsilon - 1e-3 {
            assert!(!support_vectors.contains(row));
        }
    }
    // |coefficients| live in (0, C]
    for c in dual_coefficients {
        assert!(c.abs() > 0.0 && c.abs() <= params.c + 1e-12);
    }
}
