//! SPSA on a 4-dimensional quadratic bowl.

use vqc::optimizer::{gain_sequences, spsa_minimize, SpsaConfig};

pub fn run_example() -> vqc::Result<()> {
    let cfg = SpsaConfig::with_max_iter(500);
    let (a0, c0) = gain_sequences(0, &cfg);
    println!("a_0 = {a0:.6}, c_0 = {c0:.6}, A = {}", cfg.stability_offset());

    let objective = |t: &[f64]| t.iter().map(|v| v * v).sum::<f64>();
    let out = spsa_minimize(objective, &[1.0; 4], &cfg, 2024)?;
    for k in [0, 9, 49, 99, 249, 499] {
        println!("iteration {:>3}: f = {:.6}", k + 1, out.history[k]);
    }
    let norm = out.theta.iter().map(|v| v * v).sum::<f64>().sqrt();
    println!("final θ = {:?}\n‖θ‖ = {norm:.4}", out.theta);
    Ok(())
}

fn main() -> vqc::Result<()> {
    run_example()
}
