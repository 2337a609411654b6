use std::cell::RefCell;
use std::time::Instant;

use proptest::prelude::*;
use vqc::optimizer::{gain_sequences, spsa_minimize, spsa_minimize_with, Negated, Perturbation, Rademacher, SpsaConfig};

fn quadratic(theta: &[f64]) -> f64 {
    theta.iter().map(|t| t * t).sum()
}

fn norm(theta: &[f64]) -> f64 {
    quadratic(theta).sqrt()
}

/// Replays a recorded list of ±1 draws.
struct Scripted(std::vec::IntoIter<f64>);

impl Perturbation for Scripted {
    fn fill(&mut self, delta: &mut [f64]) {
        for d in delta {
            *d = self.0.next().expect("script long enough");
        }
    }
}

/// Plain scalar SPSA written directly from the update rule.
fn reference_spsa(theta0: &[f64], draws: &[f64], iters: usize) -> Vec<f64> {
    let (a, c, alpha, gamma) = (0.2f64, 0.1f64, 0.602f64, 0.101f64);
    let big_a = iters as f64 / 10.0;
    let d = theta0.len();
    let mut theta = theta0.to_vec();
    for k in 0..iters {
        let ak = a / (k as f64 + 1.0 + big_a).powf(alpha);
        let ck = c / (k as f64 + 1.0).powf(gamma);
        let delta = &draws[k * d..(k + 1) * d];
        let plus: Vec<f64> = theta.iter().zip(delta).map(|(t, s)| t + ck * s).collect();
        let minus: Vec<f64> = theta.iter().zip(delta).map(|(t, s)| t - ck * s).collect();
        let diff = (quadratic(&plus) - quadratic(&minus)) / (2.0 * ck);
        for i in 0..d {
            theta[i] -= ak * diff * delta[i];
        }
    }
    theta
}

#[test]
fn matches_independent_scalar_implementation() {
    let iters = 60;
    let draws: Vec<f64> = (0..iters * 4)
        .map(|i| if (i * 7 + i / 3) % 5 < 2 { -1.0 } else { 1.0 })
        .collect();
    let theta0 = [1.0, 1.0, 1.0, 1.0];
    let out = spsa_minimize_with(
        quadratic,
        &theta0,
        &SpsaConfig::with_max_iter(iters),
        Scripted(draws.clone().into_iter()),
    )
    .unwrap();
    let expected = reference_spsa(&theta0, &draws, iters);
    for (a, b) in out.theta.iter().zip(&expected) {
        assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
    }
}

#[test]
fn quadratic_benchmark_over_100_seeds() {
    let start = Instant::now();
    let cfg = SpsaConfig::with_max_iter(500);
    let theta0 = [1.0; 4];
    let mut close = 0;
    let mut improved = 0;
    for seed in 0..100 {
        let out = spsa_minimize(quadratic, &theta0, &cfg, seed).unwrap();
        close += usize::from(norm(&out.theta) <= 0.15);
        improved += usize::from(out.history[499] < quadratic(&theta0));
    }
    assert!(close >= 95, "{close}/100 seeds reached the 0.15 ball");
    assert!(improved >= 95, "{improved}/100 seeds improved");
    assert!(start.elapsed().as_secs_f64() < 5.0);
}

#[test]
fn update_size_bounded_by_gain_times_lipschitz() {
    let cfg = SpsaConfig::with_max_iter(500);
    for seed in 0..10 {
        let calls = RefCell::new(Vec::new());
        let objective = |t: &[f64]| {
            calls.borrow_mut().push(t.to_vec());
            quadratic(t)
        };
        spsa_minimize(objective, &[1.0; 4], &cfg, seed).unwrap();
        let calls = calls.into_inner();
        for (k, triple) in calls.chunks(3).enumerate() {
            let (plus, minus, next) = (&triple[0], &triple[1], &triple[2]);
            let current: Vec<f64> = plus.iter().zip(minus).map(|(p, m)| (p + m) / 2.0).collect();
            let (ak, ck) = gain_sequences(k, &cfg);
            let lipschitz = 2.0 * (current.iter().map(|t| t.abs()).sum::<f64>() + ck * 4.0);
            for (n, c) in next.iter().zip(&current) {
                assert!((n - c).abs() <= ak * lipschitz + 1e-12, "iteration {k}");
            }
        }
    }
}

proptest! {
    #[test]
    fn seed_determinism(seed in any::<u64>(), theta0 in prop::collection::vec(-2.0f64..2.0, 0..6)) {
        let cfg = SpsaConfig::with_max_iter(40);
        let a = spsa_minimize(quadratic, &theta0, &cfg, seed).unwrap();
        let b = spsa_minimize(quadratic, &theta0, &cfg, seed).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn negated_perturbations_give_identical_updates(seed in any::<u64>(), theta0 in prop::collection::vec(-2.0f64..2.0, 1..6)) {
        let cfg = SpsaConfig::with_max_iter(40);
        let objective = |t: &[f64]| quadratic(t) + t.iter().map(|x| x.sin()).sum::<f64>();
        let a = spsa_minimize_with(objective, &theta0, &cfg, Rademacher::new(seed)).unwrap();
        let b = spsa_minimize_with(objective, &theta0, &cfg, Negated(Rademacher::new(seed))).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn gains_decrease_monotonically(k in 0usize..10_000) {
        let cfg = SpsaConfig::default();
        let (a0, c0) = gain_sequences(k, &cfg);
        let (a1, c1) = gain_sequences(k + 1, &cfg);
        prop_assert!(a1 < a0 && c1 < c0 && a1 > 0.0 && c1 > 0.0);
    }
}
