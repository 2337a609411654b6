//! Shared fixtures: an independent dense-matrix reference simulator and
//! random circuit generators.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vqc::sim::{Circuit, GateOp};

pub type CMat = DMatrix<Complex64>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn gate_2x2(op: &GateOp) -> CMat {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    match *op {
        GateOp::H(_) => CMat::from_row_slice(2, 2, &[c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0)]),
        GateOp::Rz(_, t) => CMat::from_row_slice(
            2,
            2,
            &[Complex64::from_polar(1.0, -t / 2.0), c(0.0, 0.0), c(0.0, 0.0), Complex64::from_polar(1.0, t / 2.0)],
        ),
        GateOp::Ry(_, t) => {
            let (sn, cs) = (t / 2.0).sin_cos();
            CMat::from_row_slice(2, 2, &[c(cs, 0.0), c(-sn, 0.0), c(sn, 0.0), c(cs, 0.0)])
        }
        GateOp::Cz(..) => unreachable!("two-qubit gate"),
    }
}

/// Kronecker product with qubit `n-1` as the leftmost factor, so qubit `k`
/// owns bit `k` of the row index.
fn embed(single: &CMat, target: usize, n: usize) -> CMat {
    let mut full = CMat::identity(1, 1);
    for q in (0..n).rev() {
        let factor = if q == target { single.clone() } else { CMat::identity(2, 2) };
        full = full.kronecker(&factor);
    }
    full
}

pub fn gate_matrix(op: &GateOp, n: usize) -> CMat {
    match *op {
        GateOp::Cz(a, b) => {
            let dim = 1usize << n;
            CMat::from_fn(dim, dim, |i, j| {
                if i != j {
                    c(0.0, 0.0)
                } else if (i >> a) & 1 == 1 && (i >> b) & 1 == 1 {
                    c(-1.0, 0.0)
                } else {
                    c(1.0, 0.0)
                }
            })
        }
        GateOp::H(q) | GateOp::Rz(q, _) | GateOp::Ry(q, _) => embed(&gate_2x2(op), q, n),
    }
}

/// Full unitary as the ordered matrix product `G_last ··· G_first`.
pub fn circuit_unitary(ops: &[GateOp], n: usize) -> CMat {
    ops.iter()
        .fold(CMat::identity(1 << n, 1 << n), |u, op| gate_matrix(op, n) * u)
}

pub fn zero_state(n: usize) -> DVector<Complex64> {
    let mut v = DVector::from_element(1 << n, c(0.0, 0.0));
    v[0] = c(1.0, 0.0);
    v
}

pub fn random_op(rng: &mut ChaCha8Rng, n: usize) -> GateOp {
    let kinds = if n >= 2 { 4 } else { 3 };
    let angle = rng.random_range(-2.0 * std::f64::consts::PI..2.0 * std::f64::consts::PI);
    match rng.random_range(0..kinds) {
        0 => GateOp::H(rng.random_range(0..n)),
        1 => GateOp::Rz(rng.random_range(0..n), angle),
        2 => GateOp::Ry(rng.random_range(0..n), angle),
        _ => {
            let a = rng.random_range(0..n);
            let mut b = rng.random_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            GateOp::Cz(a, b)
        }
    }
}

pub fn random_circuit(seed: u64, max_qubits: usize, max_gates: usize) -> Circuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=max_qubits);
    let len = rng.random_range(0..=max_gates);
    let mut circuit = Circuit::new(n);
    for _ in 0..len {
        circuit.push(random_op(&mut rng, n)).unwrap();
    }
    circuit
}

pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Even-parity projector on `measured`, conjugated by `u`, evaluated on |0…0⟩.
pub fn oracle_parity_expectation(u: &CMat, n: usize, measured: &[usize]) -> f64 {
    let dim = 1usize << n;
    let projector = CMat::from_fn(dim, dim, |i, j| {
        let weight: u32 = measured.iter().map(|&q| ((i >> q) & 1) as u32).sum();
        if i == j && weight.is_multiple_of(2) {
            c(1.0, 0.0)
        } else {
            c(0.0, 0.0)
        }
    });
    let psi = u * zero_state(n);
    (psi.adjoint() * projector * &psi)[(0, 0)].re
}
