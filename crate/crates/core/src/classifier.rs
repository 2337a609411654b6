//! Parity discriminant, label assignment, soft loss and SPSA training.
//!
//! The discriminant of an event is the probability that the measured qubits
//! show even parity: `⟨Φ(x)|W†(θ) (1 + f)/2 W(θ)|Φ(x)⟩` with `f` the parity
//! observable on the measured register.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circuits::{assemble_classifier_circuit, param_count, CircuitConfig, ThetaVector};
use crate::data::Event;
use crate::error::{Error, Result};
use crate::noise::{apply_readout_noise, build_calibration_matrix, mitigate, CalibrationMatrix, ReadoutNoiseModel};
use crate::optimizer::{spsa_minimize, SpsaConfig};
use crate::seed::{self, derive_seed};
use crate::sim::{marginal_distribution, sample_counts, StateVector};

const THETA_STREAM: u64 = 0x74_6865_7461;
const SPSA_STREAM: u64 = 0x7370_7361;
const LOSS_STREAM: u64 = 0x6c6f_7373;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifierModel {
    pub config: CircuitConfig,
    pub theta: ThetaVector,
    pub threshold: f64,
}

impl ClassifierModel {
    pub fn new(config: CircuitConfig, theta: ThetaVector) -> Result<Self> {
        let model = Self {
            config,
            theta,
            threshold: 0.5,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        self.config.validate()?;
        if self.theta.len() != param_count(&self.config) {
            return Err(Error::Shape(format!(
                "theta has {} angles, config needs {}",
                self.theta.len(),
                param_count(&self.config)
            )));
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(Error::Config(format!("threshold {} not in (0, 1)", self.threshold)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EvalKind {
    /// Probabilities straight from the statevector.
    Exact,
    /// Finite-shot estimate.
    Sampled { shots: u64 },
}

/// How a discriminant is read out.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalMode {
    pub kind: EvalKind,
    /// Readout noise applied to sampled outcomes.
    pub noise: Option<ReadoutNoiseModel>,
    pub mitigation: bool,
    /// Calibration used for mitigation; when absent the analytic matrix of
    /// `noise` is used.
    pub calibration: Option<CalibrationMatrix>,
}

impl EvalMode {
    pub fn exact() -> Self {
        Self {
            kind: EvalKind::Exact,
            noise: None,
            mitigation: false,
            calibration: None,
        }
    }

    pub fn sampled(shots: u64) -> Self {
        Self {
            kind: EvalKind::Sampled { shots },
            ..Self::exact()
        }
    }

    pub fn with_noise(mut self, noise: ReadoutNoiseModel) -> Self {
        self.noise = Some(noise);
        self
    }

    pub fn with_mitigation(mut self, calibration: Option<CalibrationMatrix>) -> Self {
        self.mitigation = true;
        self.calibration = calibration;
        self
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            EvalKind::Exact => {
                if self.mitigation || self.noise.is_some() {
                    return Err(Error::Config(
                        "readout noise and mitigation need sampled evaluation".into(),
                    ));
                }
            }
            EvalKind::Sampled { shots } => {
                if shots < 1 {
                    return Err(Error::Config("sampled evaluation needs shots >= 1".into()));
                }
                if self.mitigation && self.noise.is_none() && self.calibration.is_none() {
                    return Err(Error::Config(
                        "mitigation needs a noise model or a calibration matrix".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Mode resolved against a measured register.
struct Readout {
    kind: EvalKind,
    forward: Option<CalibrationMatrix>,
    correction: Option<CalibrationMatrix>,
}

impl Readout {
    fn resolve(mode: &EvalMode, measured: &[usize]) -> Result<Self> {
        mode.validate()?;
        let forward = mode
            .noise
            .as_ref()
            .map(|n| build_calibration_matrix(n, measured))
            .transpose()?;
        let correction = if mode.mitigation {
            match &mode.calibration {
                Some(c) => Some(c.clone()),
                None => forward.clone(),
            }
        } else {
            None
        };
        if let Some(c) = &correction {
            if c.measured_count() != measured.len() {
                return Err(Error::Shape(format!(
                    "calibration covers {} qubits, {} are measured",
                    c.measured_count(),
                    measured.len()
                )));
            }
        }
        Ok(Self {
            kind: mode.kind,
            forward,
            correction,
        })
    }

    fn score(&self, state: &StateVector, measured: &[usize], seed: u64) -> Result<f64> {
        let dist = marginal_distribution(state, measured)?;
        let shots = match self.kind {
            EvalKind::Exact => return Ok(dist.even_parity_probability()),
            EvalKind::Sampled { shots } => shots,
        };
        let observed = match &self.forward {
            Some(a) => apply_readout_noise(&dist, a)?,
            None => dist,
        };
        let counts = sample_counts(&observed, shots, seed)?;
        match &self.correction {
            Some(a) => Ok(mitigate(&counts, a)?.even_parity_probability()),
            None => Ok(counts.even_parity_fraction().clamp(0.0, 1.0)),
        }
    }
}

/// Exact even-parity probability of `state` on `measured`.
pub fn parity_discriminant(state: &StateVector, measured: &[usize]) -> Result<f64> {
    Ok(marginal_distribution(state, measured)?.even_parity_probability())
}

/// The prepared classifier state and its measured register for one event.
pub fn classifier_state(x: &[f64], model: &ClassifierModel) -> Result<(StateVector, Vec<usize>)> {
    let (circuit, measured) = assemble_classifier_circuit(x, &model.theta, &model.config)?;
    let mut state = StateVector::new(model.config.n_qubits)?;
    state.apply_circuit(&circuit)?;
    Ok((state, measured))
}

pub fn discriminant(x: &[f64], model: &ClassifierModel, mode: &EvalMode, seed: u64) -> Result<f64> {
    let (state, measured) = classifier_state(x, model)?;
    Readout::resolve(mode, &measured)?.score(&state, &measured, seed)
}

/// Scores every row; event `i` uses seed `derive_seed(seed, i)`.
pub fn score_all(
    xs: &[Vec<f64>],
    model: &ClassifierModel,
    mode: &EvalMode,
    seed: u64,
) -> Result<Vec<f64>> {
    model.validate()?;
    let (_, measured) = crate::circuits::build_measurement_prep(model.config.n_qubits)?;
    let readout = Readout::resolve(mode, &measured)?;
    xs.iter()
        .enumerate()
        .map(|(i, x)| {
            let (state, measured) = classifier_state(x, model)?;
            readout.score(&state, &measured, derive_seed(seed, i as u64))
        })
        .collect()
}

/// 1 when `score > threshold`, otherwise 0.
pub fn predict(score: f64, model: &ClassifierModel) -> u8 {
    u8::from(score > model.threshold)
}

/// Mean probability that a single parity readout mislabels an event.
pub fn loss_from_scores(scores: &[f64], labels: &[u8]) -> Result<f64> {
    if scores.is_empty() {
        return Err(Error::Argument("loss needs at least one event".into()));
    }
    if scores.len() != labels.len() {
        return Err(Error::Shape(format!(
            "{} scores for {} labels",
            scores.len(),
            labels.len()
        )));
    }
    let total: f64 = scores
        .iter()
        .zip(labels)
        .map(|(&p, &y)| if y == 1 { 1.0 - p } else { p })
        .sum();
    Ok(total / scores.len() as f64)
}

fn check_dataset(dataset: &[Event], n_qubits: usize) -> Result<()> {
    if dataset.is_empty() {
        return Err(Error::Argument("dataset is empty".into()));
    }
    for (i, e) in dataset.iter().enumerate() {
        if e.label > 1 {
            return Err(Error::Argument(format!("event {i} has label {}", e.label)));
        }
        if e.features.len() != n_qubits {
            return Err(Error::Shape(format!(
                "event {i} has {} features for {n_qubits} qubits",
                e.features.len()
            )));
        }
    }
    Ok(())
}

pub fn empirical_loss(dataset: &[Event], model: &ClassifierModel, mode: &EvalMode, seed: u64) -> Result<f64> {
    check_dataset(dataset, model.config.n_qubits)?;
    let xs: Vec<Vec<f64>> = dataset.iter().map(|e| e.features.clone()).collect();
    let labels: Vec<u8> = dataset.iter().map(|e| e.label).collect();
    loss_from_scores(&score_all(&xs, model, mode, seed)?, &labels)
}

/// Loss per iteration; iteration 0 is the starting point.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LossHistory(pub Vec<(usize, f64)>);

impl LossHistory {
    pub fn initial(&self) -> Option<f64> {
        self.0.first().map(|&(_, l)| l)
    }

    pub fn last(&self) -> Option<f64> {
        self.0.last().map(|&(_, l)| l)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Two columns, `iteration,loss`, one row per iteration.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "iteration,loss")?;
        for (k, loss) in &self.0 {
            writeln!(out, "{k},{loss:?}")?;
        }
        Ok(())
    }
}

/// Initial angles, uniform on [−π, π).
pub fn initial_theta(config: &CircuitConfig, seed: u64) -> ThetaVector {
    let mut rng = seed::rng(derive_seed(seed, THETA_STREAM));
    ThetaVector((0..param_count(config)).map(|_| rng.random_range(-PI..PI)).collect())
}

/// Minimizes the empirical loss over θ with SPSA and returns the last iterate.
pub fn train(
    train_set: &[Event],
    config: &CircuitConfig,
    spsa_cfg: &SpsaConfig,
    mode: &EvalMode,
    seed: u64,
) -> Result<(ClassifierModel, LossHistory)> {
    config.validate()?;
    spsa_cfg.validate()?;
    mode.validate()?;
    check_dataset(train_set, config.n_qubits)?;

    let loss_seed = derive_seed(seed, LOSS_STREAM);
    let theta0 = initial_theta(config, seed);
    let mut model = ClassifierModel::new(config.clone(), theta0.clone())?;
    let initial = empirical_loss(train_set, &model, mode, loss_seed)?;

    let mut failure: Option<Error> = None;
    let outcome = {
        let mut probe = model.clone();
        let objective = |theta: &[f64]| {
            probe.theta.0.copy_from_slice(theta);
            match empirical_loss(train_set, &probe, mode, loss_seed) {
                Ok(v) => v,
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NAN
                }
            }
        };
        spsa_minimize(objective, theta0.as_slice(), spsa_cfg, derive_seed(seed, SPSA_STREAM))
    };
    let outcome = match (outcome, failure) {
        (_, Some(e)) => return Err(e),
        (result, None) => result?,
    };

    model.theta = ThetaVector(outcome.theta);
    let mut history = vec![(0, initial)];
    history.extend(outcome.history.into_iter().enumerate().map(|(k, l)| (k + 1, l)));
    Ok((model, LossHistory(history)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::ReadoutError;

    fn model(n: usize, var_depth: usize, theta: Vec<f64>) -> ClassifierModel {
        ClassifierModel::new(CircuitConfig::new(n, 1, var_depth).unwrap(), ThetaVector(theta)).unwrap()
    }

    #[test]
    fn trivial_two_qubit_discriminant() {
        let m = model(2, 0, vec![]);
        let p = discriminant(&[0.0, 0.0], &m, &EvalMode::exact(), 0).unwrap();
        assert!((p - 0.5).abs() < 1e-12);
    }

    #[test]
    fn all_zero_measurement_is_certain() {
        let state = StateVector::basis(4, 0b1010).unwrap();
        assert_eq!(parity_discriminant(&state, &[0, 2]).unwrap(), 1.0);
    }

    #[test]
    fn predict_tie_rule() {
        let m = model(2, 0, vec![]);
        assert_eq!(predict(0.9, &m), 1);
        assert_eq!(predict(0.5, &m), 0);
        assert_eq!(predict(0.49, &m), 0);
    }

    #[test]
    fn loss_examples() {
        assert_eq!(loss_from_scores(&[1.0, 1.0], &[1, 1]).unwrap(), 0.0);
        assert_eq!(loss_from_scores(&[0.5, 0.5, 0.5], &[1, 0, 1]).unwrap(), 0.5);
        assert!((loss_from_scores(&[0.8, 0.3], &[1, 0]).unwrap() - 0.25).abs() < 1e-15);
        assert!(loss_from_scores(&[], &[]).is_err());
        let m = model(2, 0, vec![]);
        assert!(matches!(empirical_loss(&[], &m, &EvalMode::exact(), 0), Err(Error::Argument(_))));
    }

    #[test]
    fn eval_mode_validation() {
        let noise = ReadoutNoiseModel::uniform([0], ReadoutError::symmetric(0.05).unwrap()).unwrap();
        assert!(EvalMode::exact().with_noise(noise.clone()).validate().is_err());
        assert!(EvalMode::sampled(0).validate().is_err());
        assert!(EvalMode::sampled(10).with_mitigation(None).validate().is_err());
        assert!(EvalMode::sampled(10).with_noise(noise).with_mitigation(None).validate().is_ok());
    }

    #[test]
    fn missing_noise_entry_is_config_error() {
        let m = model(4, 0, vec![]);
        let noise = ReadoutNoiseModel::uniform([0], ReadoutError::symmetric(0.05).unwrap()).unwrap();
        let mode = EvalMode::sampled(100).with_noise(noise);
        assert!(matches!(discriminant(&[0.0; 4], &m, &mode, 0), Err(Error::Config(_))));
    }

    #[test]
    fn zero_depth_training_is_flat() {
        let events: Vec<Event> = (0..10)
            .map(|i| Event {
                label: (i % 2) as u8,
                features: vec![i as f64 * 0.3, -0.2],
            })
            .collect();
        let cfg = CircuitConfig::new(2, 1, 0).unwrap();
        let (m, history) = train(&events, &cfg, &SpsaConfig::with_max_iter(5), &EvalMode::exact(), 1).unwrap();
        assert!(m.theta.is_empty());
        assert_eq!(history.len(), 6);
        let first = history.initial().unwrap();
        assert!(history.0.iter().all(|&(_, l)| l == first));
    }
}
