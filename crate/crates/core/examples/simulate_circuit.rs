//! Build a small circuit, inspect the statevector, marginalize and sample.
//!
//! ```text
//! cargo run --example simulate_circuit
//! ```

use vqc::sim::{marginal_distribution, sample_counts, Circuit, StateVector};

pub fn run_example() -> vqc::Result<()> {
    // |Φ⁺⟩-like state: H on qubit 0, then a CZ sandwiched by H on qubit 1
    let mut circuit = Circuit::new(3);
    circuit.h(0)?.h(1)?.cz(0, 1)?.h(1)?.ry(2, 0.8)?.rz(2, 0.3)?;

    let mut state = StateVector::new(3)?;
    state.apply_circuit(&circuit)?;
    println!("{} gates, norm {:.12}", circuit.len(), state.norm());
    for (index, amp) in state.amplitudes().iter().enumerate() {
        if amp.norm_sqr() > 1e-12 {
            println!("  |{index:03b}⟩  {:+.6} {:+.6}i", amp.re, amp.im);
        }
    }

    let dist = marginal_distribution(&state, &[0, 1])?;
    println!("P(q1 q0) = {:?}", dist.probs());
    println!("even parity on (0, 1): {:.6}", dist.even_parity_probability());

    let counts = sample_counts(&dist, 10_000, 7)?;
    println!("10000 shots: {:?}, even fraction {:.4}", counts.counts(), counts.even_parity_fraction());
    Ok(())
}

fn main() -> vqc::Result<()> {
    run_example()
}
