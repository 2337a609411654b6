use proptest::prelude::*;
use vqc::noise::{
    apply_readout_noise, build_calibration_matrix, calibrate_empirical, mitigate, mitigate_distribution,
    noisy_sampler, ReadoutError, ReadoutNoiseModel,
};
use vqc::sim::{sample_counts, Counts, OutcomeDistribution};

fn noise_model(errors: &[(f64, f64)]) -> (ReadoutNoiseModel, Vec<usize>) {
    let mut model = ReadoutNoiseModel::new();
    let measured: Vec<usize> = (0..errors.len()).map(|i| 2 * i).collect();
    for (&q, &(p01, p10)) in measured.iter().zip(errors) {
        model.set(q, ReadoutError::new(p01, p10).unwrap()).unwrap();
    }
    (model, measured)
}

fn distribution(weights: &[f64], measured: &[usize]) -> OutcomeDistribution {
    let total: f64 = weights.iter().sum();
    OutcomeDistribution::new(measured.to_vec(), weights.iter().map(|w| w / total).collect()).unwrap()
}

fn case() -> impl Strategy<Value = (Vec<(f64, f64)>, Vec<f64>)> {
    (1usize..=3).prop_flat_map(|m| {
        (
            prop::collection::vec((0.0f64..0.3, 0.0f64..0.3), m),
            prop::collection::vec(0.0f64..1.0, 1 << m).prop_filter("mass", |w| w.iter().sum::<f64>() > 0.05),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exact_round_trip((errors, weights) in case()) {
        let (model, measured) = noise_model(&errors);
        let a = build_calibration_matrix(&model, &measured).unwrap();
        let truth = distribution(&weights, &measured);
        let observed = apply_readout_noise(&truth, &a).unwrap();
        let recovered = mitigate_distribution(&observed, &a).unwrap();
        for (x, y) in recovered.probs().iter().zip(truth.probs()) {
            prop_assert!((x - y).abs() <= 1e-8, "{} vs {}", x, y);
        }
    }

    #[test]
    fn analytic_columns_are_stochastic((errors, _w) in case()) {
        let (model, measured) = noise_model(&errors);
        for s in build_calibration_matrix(&model, &measured).unwrap().column_sums() {
            prop_assert!((s - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn mitigation_output_is_a_distribution((errors, _w) in case(), raw in prop::collection::vec(0u64..50, 8), seed in any::<u64>()) {
        let (model, measured) = noise_model(&errors);
        let a = build_calibration_matrix(&model, &measured).unwrap();
        let mut bins = raw[..a.dim()].to_vec();
        bins[(seed as usize) % a.dim()] += 1;
        let p = mitigate(&Counts::new(measured, bins).unwrap(), &a).unwrap();
        prop_assert!(p.probs().iter().all(|&v| v >= 0.0));
        prop_assert!((p.probs().iter().sum::<f64>() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn empirical_columns_are_stochastic((errors, _w) in case(), shots in 1u64..500, seed in any::<u64>()) {
        let (model, measured) = noise_model(&errors);
        let analytic = build_calibration_matrix(&model, &measured).unwrap();
        let a = calibrate_empirical(noisy_sampler(&analytic), &measured, shots, seed).unwrap();
        for s in a.column_sums() {
            prop_assert!((s - 1.0).abs() <= 1e-12);
        }
    }
}

#[test]
fn two_qubit_round_trip_exact_and_sampled() {
    let (model, measured) = noise_model(&[(0.1, 0.1), (0.1, 0.1)]);
    let a = build_calibration_matrix(&model, &measured).unwrap();
    let truth = distribution(&[0.4, 0.1, 0.2, 0.3], &measured);
    let observed = apply_readout_noise(&truth, &a).unwrap();

    let exact = mitigate_distribution(&observed, &a).unwrap();
    for (x, y) in exact.probs().iter().zip(truth.probs()) {
        assert!((x - y).abs() <= 1e-8);
    }

    for seed in 0..5 {
        let counts = sample_counts(&observed, 100_000, seed).unwrap();
        let p = mitigate(&counts, &a).unwrap();
        for (x, y) in p.probs().iter().zip(truth.probs()) {
            assert!((x - y).abs() <= 0.01, "seed {seed}: {x} vs {y}");
        }
    }
}
