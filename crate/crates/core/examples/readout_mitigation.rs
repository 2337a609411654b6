//! Readout noise on two measured qubits, then constrained least-squares
//! mitigation with analytic and empirically calibrated matrices.

use vqc::noise::{
    apply_readout_noise, build_calibration_matrix, calibrate_empirical, mitigate, noisy_sampler, ReadoutError,
    ReadoutNoiseModel,
};
use vqc::sim::{sample_counts, OutcomeDistribution};

pub fn run_example() -> vqc::Result<()> {
    let measured = [0, 2];
    let noise = ReadoutNoiseModel::uniform(measured, ReadoutError::new(0.08, 0.12)?)?;
    let a = build_calibration_matrix(&noise, &measured)?;

    let truth = OutcomeDistribution::new(measured.to_vec(), vec![0.55, 0.05, 0.1, 0.3])?;
    let noisy = apply_readout_noise(&truth, &a)?;
    println!("true  {:?}  even parity {:.4}", truth.probs(), truth.even_parity_probability());
    println!("noisy {:?}  even parity {:.4}", noisy.probs(), noisy.even_parity_probability());

    let counts = sample_counts(&noisy, 100_000, 5)?;
    let fixed = mitigate(&counts, &a)?;
    println!("mitigated (analytic A)  {:?}", fixed.probs());

    let empirical = calibrate_empirical(noisy_sampler(&a), &measured, 20_000, 9)?;
    let fixed = mitigate(&counts, &empirical)?;
    println!("mitigated (empirical A) {:?}", fixed.probs());
    println!("even parity after mitigation {:.4}", fixed.even_parity_probability());
    Ok(())
}

fn main() -> vqc::Result<()> {
    run_example()
}
