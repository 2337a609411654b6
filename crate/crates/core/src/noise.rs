//! Per-qubit readout noise, calibration matrices and constrained
//! least-squares mitigation.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::derive_seed;
use crate::sim::{Counts, OutcomeDistribution};

const SOLVER_MAX_ITER: usize = 10_000;
const SOLVER_TOL: f64 = 1e-12;

/// Bit-flip probabilities for one qubit's readout.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReadoutError {
    /// Pr(read 1 | prepared 0)
    pub p01: f64,
    /// Pr(read 0 | prepared 1)
    pub p10: f64,
}

impl ReadoutError {
    pub fn new(p01: f64, p10: f64) -> Result<Self> {
        let e = Self { p01, p10 };
        e.validate()?;
        Ok(e)
    }

    pub fn symmetric(p: f64) -> Result<Self> {
        Self::new(p, p)
    }

    fn validate(&self) -> Result<()> {
        for p in [self.p01, self.p10] {
            if !(0.0..0.5).contains(&p) {
                return Err(Error::Config(format!(
                    "readout flip probability {p} outside [0, 0.5)"
                )));
            }
        }
        Ok(())
    }

    /// 2×2 confusion matrix indexed `[read][true]`.
    fn confusion(&self) -> [[f64; 2]; 2] {
        [[1.0 - self.p01, self.p10], [self.p01, 1.0 - self.p10]]
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ReadoutNoiseModel {
    per_qubit: BTreeMap<usize, ReadoutError>,
}

impl ReadoutNoiseModel {
    pub fn new() -> Self {
        Self::default()
    }

    /// Same error on every listed qubit.
    pub fn uniform(qubits: impl IntoIterator<Item = usize>, error: ReadoutError) -> Result<Self> {
        let mut model = Self::new();
        for q in qubits {
            model.set(q, error)?;
        }
        Ok(model)
    }

    pub fn set(&mut self, qubit: usize, error: ReadoutError) -> Result<()> {
        error.validate()?;
        self.per_qubit.insert(qubit, error);
        Ok(())
    }

    pub fn get(&self, qubit: usize) -> Option<ReadoutError> {
        self.per_qubit.get(&qubit).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, ReadoutError)> + '_ {
        self.per_qubit.iter().map(|(&q, &e)| (q, e))
    }
}

/// Column-stochastic map from true to observed outcome probabilities,
/// `A[noisy][true]`, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CalibrationMatrix {
    m: usize,
    data: Vec<f64>,
}

impl CalibrationMatrix {
    /// Wraps a row-major `2^m × 2^m` matrix after checking it is column stochastic.
    pub fn from_rows(m: usize, data: Vec<f64>) -> Result<Self> {
        let dim = 1usize << m;
        if data.len() != dim * dim {
            return Err(Error::Shape(format!(
                "calibration matrix needs {} entries, got {}",
                dim * dim,
                data.len()
            )));
        }
        if data.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::Argument("calibration entries must lie in [0, 1]".into()));
        }
        let matrix = Self { m, data };
        for col in 0..dim {
            let sum: f64 = (0..dim).map(|row| matrix.get(row, col)).sum();
            if (sum - 1.0).abs() > 1e-12 {
                return Err(Error::Argument(format!("column {col} sums to {sum}")));
            }
        }
        Ok(matrix)
    }

    pub fn identity(m: usize) -> Self {
        let dim = 1usize << m;
        let mut data = vec![0.0; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = 1.0;
        }
        Self { m, data }
    }

    pub fn measured_count(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        1 << self.m
    }

    pub fn get(&self, noisy: usize, truth: usize) -> f64 {
        self.data[noisy * self.dim() + truth]
    }

    pub fn column_sums(&self) -> Vec<f64> {
        let dim = self.dim();
        (0..dim)
            .map(|c| (0..dim).map(|r| self.get(r, c)).sum())
            .collect()
    }

    fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.dim(), self.dim(), &self.data)
    }

    fn apply(&self, p: &[f64]) -> Vec<f64> {
        let dim = self.dim();
        (0..dim)
            .map(|r| self.data[r * dim..(r + 1) * dim].iter().zip(p).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// Tensor product of the per-qubit confusion matrices, with bit `j` of an
/// outcome index belonging to `measured_qubits[j]`.
pub fn build_calibration_matrix(
    noise: &ReadoutNoiseModel,
    measured_qubits: &[usize],
) -> Result<CalibrationMatrix> {
    let confusions = measured_qubits
        .iter()
        .map(|&q| {
            noise
                .get(q)
                .map(|e| e.confusion())
                .ok_or_else(|| Error::Config(format!("no readout error given for qubit {q}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let m = measured_qubits.len();
    let dim = 1usize << m;
    let mut data = vec![0.0; dim * dim];
    for noisy in 0..dim {
        for truth in 0..dim {
            data[noisy * dim + truth] = confusions
                .iter()
                .enumerate()
                .map(|(j, c)| c[(noisy >> j) & 1][(truth >> j) & 1])
                .product();
        }
    }
    Ok(CalibrationMatrix { m, data })
}

/// Forward noise model: returns `A · p`.
pub fn apply_readout_noise(
    dist: &OutcomeDistribution,
    a: &CalibrationMatrix,
) -> Result<OutcomeDistribution> {
    if dist.dim() != a.dim() {
        return Err(Error::Shape(format!(
            "distribution has {} outcomes, calibration matrix {}",
            dist.dim(),
            a.dim()
        )));
    }
    OutcomeDistribution::new(dist.measured_qubits().to_vec(), a.apply(dist.probs()))
}

/// Euclidean projection onto the probability simplex.
fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut shift = 0.0;
    for (i, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let candidate = (cumulative - 1.0) / (i as f64 + 1.0);
        if u - candidate > 0.0 {
            shift = candidate;
        }
    }
    v.iter().map(|x| (x - shift).max(0.0)).collect()
}

fn residual_norm(a: &DMatrix<f64>, p: &DVector<f64>, b: &DVector<f64>) -> f64 {
    (a * p - b).norm()
}

/// Probability vector minimizing `‖A·p − f‖₂` for observed frequencies `f`.
///
/// Projected gradient with step `1/σ_max(A)²`, warm started from the simplex
/// projection of the unconstrained solution (or of `f` when `A` is singular).
pub fn mitigate(counts: &Counts, a: &CalibrationMatrix) -> Result<OutcomeDistribution> {
    if counts.dim() != a.dim() {
        return Err(Error::Shape(format!(
            "counts have {} outcomes, calibration matrix {}",
            counts.dim(),
            a.dim()
        )));
    }
    let freqs = counts.frequencies();
    let probs = constrained_least_squares(a, &freqs)?;
    OutcomeDistribution::new(counts.measured_qubits().to_vec(), probs)
}

/// [`mitigate`] for an observed distribution given directly as frequencies.
pub fn mitigate_distribution(observed: &OutcomeDistribution, a: &CalibrationMatrix) -> Result<OutcomeDistribution> {
    if observed.dim() != a.dim() {
        return Err(Error::Shape(format!(
            "distribution has {} outcomes, calibration matrix {}",
            observed.dim(),
            a.dim()
        )));
    }
    let probs = constrained_least_squares(a, observed.probs())?;
    OutcomeDistribution::new(observed.measured_qubits().to_vec(), probs)
}

fn constrained_least_squares(a: &CalibrationMatrix, freqs: &[f64]) -> Result<Vec<f64>> {
    let mat = a.to_matrix();
    let b = DVector::from_column_slice(freqs);

    let start = match mat.clone().lu().solve(&b) {
        Some(x) if x.iter().all(|v| v.is_finite()) => x.as_slice().to_vec(),
        _ => freqs.to_vec(),
    };
    let mut p = DVector::from_vec(project_to_simplex(&start));

    let sigma_max = mat.singular_values().max();
    if sigma_max <= 0.0 {
        return Err(Error::NonConvergence {
            iterations: 0,
            residual: b.norm(),
        });
    }
    let step = 1.0 / (sigma_max * sigma_max);
    let at = mat.transpose();

    let mut residual = residual_norm(&mat, &p, &b);
    for _ in 0..SOLVER_MAX_ITER {
        let gradient = &at * (&mat * &p - &b);
        let moved = &p - gradient * step;
        let next = DVector::from_vec(project_to_simplex(moved.as_slice()));
        let next_residual = residual_norm(&mat, &next, &b);
        p = next;
        let change = (residual - next_residual).abs();
        residual = next_residual;
        if change < SOLVER_TOL {
            return Ok(p.as_slice().to_vec());
        }
    }
    Err(Error::NonConvergence {
        iterations: SOLVER_MAX_ITER,
        residual,
    })
}

/// Estimates `A` by sampling each basis-state preparation through `sampler`.
///
/// `sampler(dist, shots, seed)` must return noisy counts for the ideal
/// distribution `dist`. Column `t` is the renormalized frequency vector for
/// basis state `t`.
pub fn calibrate_empirical<S>(
    mut sampler: S,
    measured_qubits: &[usize],
    shots_per_state: u64,
    seed: u64,
) -> Result<CalibrationMatrix>
where
    S: FnMut(&OutcomeDistribution, u64, u64) -> Result<Counts>,
{
    if shots_per_state < 1 {
        return Err(Error::Argument("shots_per_state must be >= 1".into()));
    }
    let m = measured_qubits.len();
    let dim = 1usize << m;
    let mut data = vec![0.0; dim * dim];
    for truth in 0..dim {
        let ideal = OutcomeDistribution::degenerate(measured_qubits.to_vec(), truth)?;
        let counts = sampler(&ideal, shots_per_state, derive_seed(seed, truth as u64))?;
        if counts.dim() != dim {
            return Err(Error::Shape(format!(
                "sampler returned {} outcomes, expected {dim}",
                counts.dim()
            )));
        }
        let freqs = counts.frequencies();
        let total: f64 = freqs.iter().sum();
        for (noisy, f) in freqs.iter().enumerate() {
            data[noisy * dim + truth] = f / total;
        }
    }
    Ok(CalibrationMatrix { m, data })
}

/// Sampler that applies `a` before drawing shots; usable with
/// [`calibrate_empirical`].
pub fn noisy_sampler(
    a: &CalibrationMatrix,
) -> impl FnMut(&OutcomeDistribution, u64, u64) -> Result<Counts> + '_ {
    move |dist, shots, seed| {
        let noisy = apply_readout_noise(dist, a)?;
        crate::sim::sample_counts(&noisy, shots, seed)
    }
}
