//! First-order SPSA with Rademacher perturbations.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpsaConfig {
    pub max_iter: usize,
    pub a: f64,
    pub c: f64,
    pub alpha: f64,
    pub gamma: f64,
    /// Stability offset `A`; `None` resolves to `max_iter / 10`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stability_a: Option<f64>,
}

impl Default for SpsaConfig {
    fn default() -> Self {
        Self {
            max_iter: 250,
            a: 0.2,
            c: 0.1,
            alpha: 0.602,
            gamma: 0.101,
            stability_a: None,
        }
    }
}

impl SpsaConfig {
    pub fn with_max_iter(max_iter: usize) -> Self {
        Self {
            max_iter,
            ..Self::default()
        }
    }

    pub fn stability_offset(&self) -> f64 {
        self.stability_a.unwrap_or(self.max_iter as f64 / 10.0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iter < 1 {
            return Err(Error::Config("spsa max_iter must be >= 1".into()));
        }
        if !(self.a.is_finite() && self.a > 0.0 && self.c.is_finite() && self.c > 0.0) {
            return Err(Error::Config("spsa gains a and c must be finite and positive".into()));
        }
        if !(self.alpha > 0.5 && self.alpha <= 1.0) {
            return Err(Error::Config(format!("spsa alpha {} not in (0.5, 1]", self.alpha)));
        }
        if !(self.gamma > 0.0 && self.gamma <= 0.5) {
            return Err(Error::Config(format!("spsa gamma {} not in (0, 0.5]", self.gamma)));
        }
        let big_a = self.stability_offset();
        if !(big_a.is_finite() && big_a >= 0.0) {
            return Err(Error::Config("spsa stability offset must be finite and >= 0".into()));
        }
        Ok(())
    }
}

/// Step size `a_k` and perturbation size `c_k` at iteration `k` (zero based).
pub fn gain_sequences(k: usize, cfg: &SpsaConfig) -> (f64, f64) {
    let k = k as f64;
    let a_k = cfg.a / (k + 1.0 + cfg.stability_offset()).powf(cfg.alpha);
    let c_k = cfg.c / (k + 1.0).powf(cfg.gamma);
    (a_k, c_k)
}

/// Source of the ±1 perturbation direction drawn at each iteration.
pub trait Perturbation {
    fn fill(&mut self, delta: &mut [f64]);
}

/// Independent Rademacher entries from the seeded generator.
pub struct Rademacher(ChaCha8Rng);

impl Rademacher {
    pub fn new(seed: u64) -> Self {
        Self(seed::rng(seed))
    }
}

impl Perturbation for Rademacher {
    fn fill(&mut self, delta: &mut [f64]) {
        for d in delta {
            *d = if self.0.random::<bool>() { 1.0 } else { -1.0 };
        }
    }
}

/// Wraps a source and flips the sign of every draw.
pub struct Negated<P>(pub P);

impl<P: Perturbation> Perturbation for Negated<P> {
    fn fill(&mut self, delta: &mut [f64]) {
        self.0.fill(delta);
        for d in delta {
            *d = -*d;
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpsaOutcome {
    pub theta: Vec<f64>,
    /// Objective at the updated θ after each iteration.
    pub history: Vec<f64>,
}

pub fn spsa_minimize<F>(objective: F, theta0: &[f64], cfg: &SpsaConfig, seed: u64) -> Result<SpsaOutcome>
where
    F: FnMut(&[f64]) -> f64,
{
    spsa_minimize_with(objective, theta0, cfg, Rademacher::new(seed))
}

/// SPSA driven by an explicit perturbation source.
pub fn spsa_minimize_with<F, P>(
    mut objective: F,
    theta0: &[f64],
    cfg: &SpsaConfig,
    mut perturbation: P,
) -> Result<SpsaOutcome>
where
    F: FnMut(&[f64]) -> f64,
    P: Perturbation,
{
    cfg.validate()?;
    if theta0.iter().any(|t| !t.is_finite()) {
        return Err(Error::Argument("initial theta must be finite".into()));
    }
    let dim = theta0.len();
    let mut theta = theta0.to_vec();
    let mut delta = vec![0.0; dim];
    let mut probe = vec![0.0; dim];
    let mut history = Vec::with_capacity(cfg.max_iter);

    let mut eval = |theta: &[f64], iteration: usize| -> Result<f64> {
        let value = objective(theta);
        if value.is_finite() {
            Ok(value)
        } else {
            Err(Error::NonFiniteObjective { iteration, value })
        }
    };

    for k in 0..cfg.max_iter {
        let (a_k, c_k) = gain_sequences(k, cfg);
        perturbation.fill(&mut delta);

        for ((p, t), d) in probe.iter_mut().zip(&theta).zip(&delta) {
            *p = t + c_k * d;
        }
        let plus = eval(&probe, k)?;
        for ((p, t), d) in probe.iter_mut().zip(&theta).zip(&delta) {
            *p = t - c_k * d;
        }
        let minus = eval(&probe, k)?;

        let scale = (plus - minus) / (2.0 * c_k);
        for (t, d) in theta.iter_mut().zip(&delta) {
            // 1/Δ_i = Δ_i for ±1 entries
            *t -= a_k * scale * d;
        }
        history.push(eval(&theta, k)?);
    }

    Ok(SpsaOutcome { theta, history })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_gains_at_zero() {
        let cfg = SpsaConfig {
            stability_a: Some(25.0),
            ..SpsaConfig::default()
        };
        let (a0, c0) = gain_sequences(0, &cfg);
        assert_eq!(a0, 0.2 / 26f64.powf(0.602));
        assert_eq!(c0, 0.1);
        // max_iter / 10 when unset
        assert_eq!(SpsaConfig::default().stability_offset(), 25.0);
    }

    #[test]
    fn gains_decay_monotonically() {
        let cfg = SpsaConfig::default();
        let mut prev = gain_sequences(0, &cfg);
        for k in 1..2000 {
            let cur = gain_sequences(k, &cfg);
            assert!(cur.0 < prev.0 && cur.1 < prev.1);
            prev = cur;
        }
        assert!(prev.0 < 0.02 && prev.1 < 0.05);
    }

    #[test]
    fn harmonic_schedule() {
        let cfg = SpsaConfig {
            a: 1.0,
            alpha: 1.0,
            stability_a: Some(0.0),
            ..SpsaConfig::default()
        };
        for k in 0..10 {
            assert!((gain_sequences(k, &cfg).0 - 1.0 / (k as f64 + 1.0)).abs() < 1e-15);
        }
    }

    #[test]
    fn single_iteration_uses_three_evaluations() {
        let mut calls = 0;
        let out = spsa_minimize(
            |t| {
                calls += 1;
                t.iter().map(|x| x * x).sum()
            },
            &[1.0, -1.0],
            &SpsaConfig::with_max_iter(1),
            3,
        )
        .unwrap();
        assert_eq!(calls, 3);
        assert_eq!(out.history.len(), 1);
    }

    #[test]
    fn empty_theta_is_left_alone() {
        let out = spsa_minimize(|_| 0.25, &[], &SpsaConfig::with_max_iter(5), 1).unwrap();
        assert!(out.theta.is_empty());
        assert_eq!(out.history, vec![0.25; 5]);
    }

    #[test]
    fn non_finite_objective_reports_iteration() {
        let mut calls = 0;
        let err = spsa_minimize(
            |_| {
                calls += 1;
                if calls > 4 {
                    f64::NAN
                } else {
                    1.0
                }
            },
            &[0.0],
            &SpsaConfig::with_max_iter(10),
            0,
        )
        .unwrap_err();
        assert!(matches!(err, Error::NonFiniteObjective { iteration: 1, .. }));
    }

    #[test]
    fn rejects_bad_config() {
        let bad = SpsaConfig {
            alpha: 0.4,
            ..SpsaConfig::default()
        };
        assert!(spsa_minimize(|_| 0.0, &[0.0], &bad, 0).is_err());
        let bad = SpsaConfig {
            c: 0.0,
            ..SpsaConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
