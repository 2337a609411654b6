//! Builders for the classifier's three circuit blocks: the feature map, the
//! variational ansatz and the half-measurement preparation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::Circuit;

/// Per-feature affine map `x -> gain * x + offset` applied before encoding.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureAffine {
    pub gain: f64,
    pub offset: f64,
}

impl Default for FeatureAffine {
    fn default() -> Self {
        Self {
            gain: 1.0,
            offset: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitConfig {
    pub n_qubits: usize,
    pub feature_map_depth: usize,
    pub var_depth: usize,
    /// Empty means identity on every feature.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub feature_affine: Vec<FeatureAffine>,
}

impl CircuitConfig {
    pub fn new(n_qubits: usize, feature_map_depth: usize, var_depth: usize) -> Result<Self> {
        let config = Self {
            n_qubits,
            feature_map_depth,
            var_depth,
            feature_affine: Vec::new(),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits < 2 || !self.n_qubits.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "n_qubits must be even and >= 2, got {}",
                self.n_qubits
            )));
        }
        if self.n_qubits > crate::sim::MAX_QUBITS {
            return Err(Error::Capacity(format!("{} qubits exceeds cap", self.n_qubits)));
        }
        if self.feature_map_depth < 1 {
            return Err(Error::Config("feature_map_depth must be >= 1".into()));
        }
        if !self.feature_affine.is_empty() && self.feature_affine.len() != self.n_qubits {
            return Err(Error::Config(format!(
                "feature_affine has {} entries, expected {}",
                self.feature_affine.len(),
                self.n_qubits
            )));
        }
        Ok(())
    }

    /// Applies the configured per-feature affine map.
    pub fn encode(&self, x: &[f64]) -> Vec<f64> {
        if self.feature_affine.is_empty() {
            return x.to_vec();
        }
        x.iter()
            .zip(&self.feature_affine)
            .map(|(v, m)| m.gain * v + m.offset)
            .collect()
    }
}

/// Variational angles, `2 * n_qubits` per layer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ThetaVector(pub Vec<f64>);

impl ThetaVector {
    pub fn zeros(config: &CircuitConfig) -> Self {
        Self(vec![0.0; param_count(config)])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub fn param_count(config: &CircuitConfig) -> usize {
    2 * config.n_qubits * config.var_depth
}

/// `depth` repetitions of (H on every qubit, then RZ(x_i) on qubit i).
pub fn build_feature_map(x: &[f64], depth: usize) -> Result<Circuit> {
    let n = x.len();
    if n == 0 {
        return Err(Error::Shape("feature vector is empty".into()));
    }
    let mut circuit = Circuit::new(n);
    for _ in 0..depth {
        for q in 0..n {
            circuit.h(q)?;
        }
        for (q, &angle) in x.iter().enumerate() {
            circuit.rz(q, angle)?;
        }
    }
    Ok(circuit)
}

/// Nearest-neighbour CZ layer: pairs (0,1),(2,3),… then (1,2),(3,4),….
pub fn build_entangler(n_qubits: usize) -> Result<Circuit> {
    if n_qubits < 2 {
        return Err(Error::Argument(format!(
            "entangler needs at least 2 qubits, got {n_qubits}"
        )));
    }
    let mut circuit = Circuit::new(n_qubits);
    for start in [0, 1] {
        for q in (start..n_qubits - 1).step_by(2) {
            circuit.cz(q, q + 1)?;
        }
    }
    Ok(circuit)
}

/// `var_depth` repetitions of (RY then RZ on every qubit, then the entangler).
///
/// Layer `l` reads angles `[2nl, 2n(l+1))`; qubit `i` takes RY from
/// `theta[2nl + 2i]` and RZ from `theta[2nl + 2i + 1]`.
pub fn build_variational(theta: &ThetaVector, config: &CircuitConfig) -> Result<Circuit> {
    let n = config.n_qubits;
    if theta.len() != param_count(config) {
        return Err(Error::Shape(format!(
            "theta has {} angles, config needs {}",
            theta.len(),
            param_count(config)
        )));
    }
    let mut circuit = Circuit::new(n);
    if config.var_depth == 0 {
        return Ok(circuit);
    }
    let entangler = build_entangler(n)?;
    for layer in theta.as_slice().chunks_exact(2 * n) {
        for (q, pair) in layer.chunks_exact(2).enumerate() {
            circuit.ry(q, pair[0])?.rz(q, pair[1])?;
        }
        circuit.append(&entangler)?;
    }
    Ok(circuit)
}

/// CZ on each pair (2k, 2k+1); the even member of each pair is measured.
pub fn build_measurement_prep(n_qubits: usize) -> Result<(Circuit, Vec<usize>)> {
    if n_qubits < 2 || !n_qubits.is_multiple_of(2) {
        return Err(Error::Argument(format!(
            "half measurement needs an even qubit count, got {n_qubits}"
        )));
    }
    let mut circuit = Circuit::new(n_qubits);
    for q in (0..n_qubits).step_by(2) {
        circuit.cz(q, q + 1)?;
    }
    let measured = (0..n_qubits).step_by(2).collect();
    Ok((circuit, measured))
}

/// Feature map, then variational block, then measurement prep. `x` is used
/// after the config's affine encoding.
pub fn assemble_classifier_circuit(
    x: &[f64],
    theta: &ThetaVector,
    config: &CircuitConfig,
) -> Result<(Circuit, Vec<usize>)> {
    config.validate()?;
    if x.len() != config.n_qubits {
        return Err(Error::Shape(format!(
            "{} features for {} qubits",
            x.len(),
            config.n_qubits
        )));
    }
    let mut circuit = build_feature_map(&config.encode(x), config.feature_map_depth)?;
    circuit.append(&build_variational(theta, config)?)?;
    let (prep, measured) = build_measurement_prep(config.n_qubits)?;
    circuit.append(&prep)?;
    Ok((circuit, measured))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{GateOp, StateVector};

    #[test]
    fn feature_map_counts_and_order() {
        let c = build_feature_map(&[0.1; 10], 1).unwrap();
        assert_eq!(c.len(), 20);
        let c = build_feature_map(&[0.3, -0.2], 2).unwrap();
        assert_eq!(
            c.ops(),
            &[
                GateOp::H(0),
                GateOp::H(1),
                GateOp::Rz(0, 0.3),
                GateOp::Rz(1, -0.2),
                GateOp::H(0),
                GateOp::H(1),
                GateOp::Rz(0, 0.3),
                GateOp::Rz(1, -0.2),
            ]
        );
    }

    #[test]
    fn zero_feature_map_gives_plus_state() {
        let mut s = StateVector::new(2).unwrap();
        s.apply_circuit(&build_feature_map(&[0.0, 0.0], 1).unwrap()).unwrap();
        for a in s.amplitudes() {
            assert!((a.re - 0.5).abs() < 1e-15 && a.im.abs() < 1e-15);
        }
    }

    #[test]
    fn entangler_examples() {
        assert_eq!(build_entangler(2).unwrap().ops(), &[GateOp::Cz(0, 1)]);
        assert_eq!(
            build_entangler(4).unwrap().ops(),
            &[GateOp::Cz(0, 1), GateOp::Cz(2, 3), GateOp::Cz(1, 2)]
        );
        let ten = build_entangler(10).unwrap();
        let pairs: Vec<_> = ten.ops().to_vec();
        let expected: Vec<_> = [(0, 1), (2, 3), (4, 5), (6, 7), (8, 9), (1, 2), (3, 4), (5, 6), (7, 8)]
            .into_iter()
            .map(|(a, b)| GateOp::Cz(a, b))
            .collect();
        assert_eq!(pairs, expected);
        assert!(matches!(build_entangler(1), Err(Error::Argument(_))));
    }

    #[test]
    fn variational_layout() {
        let cfg = CircuitConfig::new(2, 1, 1).unwrap();
        let theta = ThetaVector(vec![0.1, 0.2, 0.3, 0.4]);
        assert_eq!(
            build_variational(&theta, &cfg).unwrap().ops(),
            &[
                GateOp::Ry(0, 0.1),
                GateOp::Rz(0, 0.2),
                GateOp::Ry(1, 0.3),
                GateOp::Rz(1, 0.4),
                GateOp::Cz(0, 1),
            ]
        );
        let cfg0 = CircuitConfig::new(2, 1, 0).unwrap();
        assert!(build_variational(&ThetaVector(vec![]), &cfg0).unwrap().is_empty());
        let cfg10 = CircuitConfig::new(10, 1, 1).unwrap();
        assert_eq!(param_count(&cfg10), 20);
        assert_eq!(build_variational(&ThetaVector::zeros(&cfg10), &cfg10).unwrap().len(), 29);
        assert!(matches!(
            build_variational(&ThetaVector(vec![0.0; 3]), &cfg),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn param_count_examples() {
        let count = |n, d| param_count(&CircuitConfig::new(n, 1, d).unwrap());
        assert_eq!(count(10, 1), 20);
        assert_eq!(count(10, 0), 0);
        assert_eq!(count(4, 3), 24);
    }

    #[test]
    fn measurement_prep_examples() {
        let (c, m) = build_measurement_prep(2).unwrap();
        assert_eq!((c.ops(), m.as_slice()), (&[GateOp::Cz(0, 1)][..], &[0][..]));
        let (c, m) = build_measurement_prep(10).unwrap();
        assert_eq!(c.len(), 5);
        assert_eq!(m, vec![0, 2, 4, 6, 8]);
        assert!(matches!(build_measurement_prep(3), Err(Error::Argument(_))));
    }

    #[test]
    fn assembled_classifier() {
        let cfg = CircuitConfig::new(10, 1, 1).unwrap();
        let (c, m) = assemble_classifier_circuit(&[0.0; 10], &ThetaVector::zeros(&cfg), &cfg).unwrap();
        assert_eq!((c.len(), m.len()), (54, 5));

        let cfg = CircuitConfig::new(2, 1, 0).unwrap();
        let (c, m) = assemble_classifier_circuit(&[0.0, 0.0], &ThetaVector(vec![]), &cfg).unwrap();
        assert_eq!(
            c.ops(),
            &[GateOp::H(0), GateOp::H(1), GateOp::Rz(0, 0.0), GateOp::Rz(1, 0.0), GateOp::Cz(0, 1)]
        );
        assert_eq!(m, vec![0]);

        let cfg = CircuitConfig::new(2, 1, 1).unwrap();
        assert!(matches!(
            assemble_classifier_circuit(&[0.0, 0.0], &ThetaVector(vec![0.0]), &cfg),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn affine_encoding_applies_per_feature() {
        let mut cfg = CircuitConfig::new(2, 1, 0).unwrap();
        cfg.feature_affine = vec![
            FeatureAffine { gain: 2.0, offset: 0.5 },
            FeatureAffine::default(),
        ];
        assert_eq!(cfg.encode(&[1.0, 3.0]), vec![2.5, 3.0]);
        cfg.feature_affine.pop();
        assert!(cfg.validate().is_err());
    }
}
