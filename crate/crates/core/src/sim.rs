//! Dense statevector simulation over the gate set {H, RZ, RY, CZ}.
//!
//! Qubit `k` is bit `k` (value `2^k`) of a basis index. Outcome distributions
//! over a subset of qubits pack `measured_qubits[0]` as the least significant
//! bit of the outcome index.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::seed;

/// Largest register the simulator will allocate (2^24 amplitudes, 256 MiB).
pub const MAX_QUBITS: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GateOp {
    H(usize),
    Rz(usize, f64),
    Ry(usize, f64),
    Cz(usize, usize),
}

impl GateOp {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            GateOp::H(q) | GateOp::Rz(q, _) | GateOp::Ry(q, _) => vec![q],
            GateOp::Cz(a, b) => vec![a, b],
        }
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        for q in self.qubits() {
            if q >= n_qubits {
                return Err(Error::Index(format!(
                    "qubit {q} out of range for {n_qubits}-qubit register"
                )));
            }
        }
        if let GateOp::Cz(a, b) = *self {
            if a == b {
                return Err(Error::Index(format!("CZ needs distinct qubits, got ({a}, {b})")));
            }
        }
        Ok(())
    }
}

/// Ordered gate sequence on a fixed register size.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    ops: Vec<GateOp>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            ops: Vec::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn push(&mut self, op: GateOp) -> Result<&mut Self> {
        op.validate(self.n_qubits)?;
        self.ops.push(op);
        Ok(self)
    }

    pub fn h(&mut self, q: usize) -> Result<&mut Self> {
        self.push(GateOp::H(q))
    }

    pub fn rz(&mut self, q: usize, angle: f64) -> Result<&mut Self> {
        self.push(GateOp::Rz(q, angle))
    }

    pub fn ry(&mut self, q: usize, angle: f64) -> Result<&mut Self> {
        self.push(GateOp::Ry(q, angle))
    }

    pub fn cz(&mut self, a: usize, b: usize) -> Result<&mut Self> {
        self.push(GateOp::Cz(a, b))
    }

    /// Appends every gate of `other`, which must act on the same register.
    pub fn append(&mut self, other: &Circuit) -> Result<&mut Self> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::Shape(format!(
                "cannot append {}-qubit circuit to {}-qubit circuit",
                other.n_qubits, self.n_qubits
            )));
        }
        self.ops.extend_from_slice(&other.ops);
        Ok(self)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩` on `n_qubits` qubits.
    pub fn new(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::Capacity(format!(
                "n_qubits must be in 1..={MAX_QUBITS}, got {n_qubits}"
            )));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// Wraps raw amplitudes. The caller is responsible for normalization.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::Shape(format!(
                "amplitude count must be a power of two >= 2, got {len}"
            )));
        }
        let n_qubits = len.trailing_zeros() as usize;
        if n_qubits > MAX_QUBITS {
            return Err(Error::Capacity(format!("{n_qubits} qubits exceeds cap {MAX_QUBITS}")));
        }
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        let mut state = Self::new(n_qubits)?;
        if index >= state.amplitudes.len() {
            return Err(Error::Index(format!(
                "basis index {index} out of range for {n_qubits} qubits"
            )));
        }
        state.amplitudes[0] = Complex64::new(0.0, 0.0);
        state.amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(state)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Multiplies every amplitude by `e^{i·phase}`.
    pub fn apply_global_phase(&mut self, phase: f64) {
        let factor = Complex64::from_polar(1.0, phase);
        for a in &mut self.amplitudes {
            *a *= factor;
        }
    }

    pub fn apply_gate(&mut self, gate: &GateOp) -> Result<()> {
        gate.validate(self.n_qubits)?;
        match *gate {
            GateOp::H(q) => {
                let h = FRAC_1_SQRT_2;
                self.apply_single(q, |a0, a1| ((a0 + a1) * h, (a0 - a1) * h));
            }
            GateOp::Ry(q, theta) => {
                let (s, c) = (theta / 2.0).sin_cos();
                self.apply_single(q, |a0, a1| (a0 * c - a1 * s, a0 * s + a1 * c));
            }
            GateOp::Rz(q, theta) => {
                let lo = Complex64::from_polar(1.0, -theta / 2.0);
                let hi = Complex64::from_polar(1.0, theta / 2.0);
                self.apply_single(q, |a0, a1| (a0 * lo, a1 * hi));
            }
            GateOp::Cz(a, b) => {
                let mask = (1usize << a) | (1usize << b);
                for (i, amp) in self.amplitudes.iter_mut().enumerate() {
                    if i & mask == mask {
                        *amp = -*amp;
                    }
                }
            }
        }
        Ok(())
    }

    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.n_qubits() != self.n_qubits {
            return Err(Error::Shape(format!(
                "circuit acts on {} qubits, state has {}",
                circuit.n_qubits(),
                self.n_qubits
            )));
        }
        for op in circuit.ops() {
            self.apply_gate(op)?;
        }
        Ok(())
    }

    // Visits each amplitude pair (bit q = 0, bit q = 1) in ascending index order.
    fn apply_single<F>(&mut self, q: usize, f: F)
    where
        F: Fn(Complex64, Complex64) -> (Complex64, Complex64),
    {
        let stride = 1usize << q;
        for block in self.amplitudes.chunks_exact_mut(stride << 1) {
            let (lo, hi) = block.split_at_mut(stride);
            for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
                let (b0, b1) = f(*a0, *a1);
                *a0 = b0;
                *a1 = b1;
            }
        }
    }
}

/// Value-in/value-out gate application.
pub fn apply_gate(mut state: StateVector, gate: &GateOp) -> Result<StateVector> {
    state.apply_gate(gate)?;
    Ok(state)
}

/// Value-in/value-out circuit application.
pub fn apply_circuit(mut state: StateVector, circuit: &Circuit) -> Result<StateVector> {
    state.apply_circuit(circuit)?;
    Ok(state)
}

/// Probabilities over the bitstrings of a subset of qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct OutcomeDistribution {
    measured_qubits: Vec<usize>,
    probs: Vec<f64>,
}

impl OutcomeDistribution {
    /// Builds a distribution, clamping tiny negatives to zero. Entries must be
    /// finite, no smaller than `-1e-12`, and sum to 1 within `1e-10`.
    pub fn new(measured_qubits: Vec<usize>, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != 1usize << measured_qubits.len() {
            return Err(Error::Shape(format!(
                "{} probabilities for {} measured qubits",
                probs.len(),
                measured_qubits.len()
            )));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < -1e-12) {
            return Err(Error::Argument("probabilities must be finite and non-negative".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::Argument(format!("probabilities sum to {total}, expected 1")));
        }
        let probs = probs.into_iter().map(|p| p.max(0.0)).collect();
        Ok(Self {
            measured_qubits,
            probs,
        })
    }

    /// Point mass on outcome `index`.
    pub fn degenerate(measured_qubits: Vec<usize>, index: usize) -> Result<Self> {
        let dim = 1usize << measured_qubits.len();
        if index >= dim {
            return Err(Error::Index(format!("outcome {index} out of range for {dim} outcomes")));
        }
        let mut probs = vec![0.0; dim];
        probs[index] = 1.0;
        Ok(Self {
            measured_qubits,
            probs,
        })
    }

    pub fn measured_qubits(&self) -> &[usize] {
        &self.measured_qubits
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn dim(&self) -> usize {
        self.probs.len()
    }

    /// Total probability of outcomes with an even number of 1 bits.
    pub fn even_parity_probability(&self) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .filter(|(b, _)| b.count_ones() % 2 == 0)
            .map(|(_, p)| p)
            .sum::<f64>()
            .clamp(0.0, 1.0)
    }
}

fn check_measured(n_qubits: usize, measured: &[usize]) -> Result<()> {
    if measured.is_empty() {
        return Err(Error::Index("measured qubit list is empty".into()));
    }
    for (i, &q) in measured.iter().enumerate() {
        if q >= n_qubits {
            return Err(Error::Index(format!(
                "measured qubit {q} out of range for {n_qubits} qubits"
            )));
        }
        if measured[..i].contains(&q) {
            return Err(Error::Index(format!("measured qubit {q} listed twice")));
        }
    }
    Ok(())
}

pub fn marginal_distribution(
    state: &StateVector,
    measured_qubits: &[usize],
) -> Result<OutcomeDistribution> {
    check_measured(state.n_qubits(), measured_qubits)?;
    let mut probs = vec![0.0; 1usize << measured_qubits.len()];
    for (index, amp) in state.amplitudes().iter().enumerate() {
        let outcome = measured_qubits
            .iter()
            .enumerate()
            .fold(0usize, |acc, (bit, &q)| acc | (((index >> q) & 1) << bit));
        probs[outcome] += amp.norm_sqr();
    }
    Ok(OutcomeDistribution {
        measured_qubits: measured_qubits.to_vec(),
        probs,
    })
}

/// Shot counts over the outcomes of an [`OutcomeDistribution`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counts {
    measured_qubits: Vec<usize>,
    counts: Vec<u64>,
    shots: u64,
}

impl Counts {
    pub fn new(measured_qubits: Vec<usize>, counts: Vec<u64>) -> Result<Self> {
        if counts.len() != 1usize << measured_qubits.len() {
            return Err(Error::Shape(format!(
                "{} count bins for {} measured qubits",
                counts.len(),
                measured_qubits.len()
            )));
        }
        let shots: u64 = counts.iter().sum();
        if shots == 0 {
            return Err(Error::Argument("counts must contain at least one shot".into()));
        }
        Ok(Self {
            measured_qubits,
            counts,
            shots,
        })
    }

    pub fn measured_qubits(&self) -> &[usize] {
        &self.measured_qubits
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn dim(&self) -> usize {
        self.counts.len()
    }

    pub fn frequencies(&self) -> Vec<f64> {
        let shots = self.shots as f64;
        self.counts.iter().map(|&c| c as f64 / shots).collect()
    }

    pub fn even_parity_fraction(&self) -> f64 {
        let even: u64 = self
            .counts
            .iter()
            .enumerate()
            .filter(|(b, _)| b.count_ones() % 2 == 0)
            .map(|(_, c)| c)
            .sum();
        even as f64 / self.shots as f64
    }
}

/// Multinomial draw of `shots` outcomes, sampled as a chain of conditional
/// binomials in outcome order.
pub fn sample_counts(dist: &OutcomeDistribution, shots: u64, seed: u64) -> Result<Counts> {
    if shots < 1 {
        return Err(Error::Argument("shots must be >= 1".into()));
    }
    let mut rng = seed::rng(seed);
    let probs = dist.probs();
    let mut counts = vec![0u64; probs.len()];
    let mut remaining_shots = shots;
    let mut remaining_mass = 1.0f64;
    for (i, &p) in probs.iter().enumerate() {
        if remaining_shots == 0 {
            break;
        }
        if i + 1 == probs.len() {
            counts[i] = remaining_shots;
            break;
        }
        let q = if remaining_mass > 0.0 {
            (p / remaining_mass).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let k = if q >= 1.0 {
            remaining_shots
        } else if q <= 0.0 {
            0
        } else {
            Binomial::new(remaining_shots, q)
                .expect("binomial parameters are in range")
                .sample(&mut rng)
        };
        counts[i] = k;
        remaining_shots -= k;
        remaining_mass -= p;
    }
    Counts::new(dist.measured_qubits().to_vec(), counts)
}
