//! Assemble the classifier circuit for one event and compare exact and
//! shot-based discriminants.

use vqc::circuits::{assemble_classifier_circuit, param_count, CircuitConfig};
use vqc::classifier::{discriminant, initial_theta, predict, ClassifierModel, EvalMode};

pub fn run_example() -> vqc::Result<()> {
    let config = CircuitConfig::new(6, 1, 2)?;
    let theta = initial_theta(&config, 11);
    let model = ClassifierModel::new(config.clone(), theta)?;
    let x = [0.4, -1.2, 2.5, 0.0, -2.9, 1.1];

    let (circuit, measured) = assemble_classifier_circuit(&x, &model.theta, &config)?;
    println!(
        "n=6, feature map depth 1, var depth 2: {} angles, {} gates, measuring {measured:?}",
        param_count(&config),
        circuit.len()
    );

    let exact = discriminant(&x, &model, &EvalMode::exact(), 0)?;
    println!("exact discriminant {exact:.6} -> label {}", predict(exact, &model));
    for shots in [100, 1_000, 10_000, 100_000] {
        let sampled = discriminant(&x, &model, &EvalMode::sampled(shots), 3)?;
        let se = (exact * (1.0 - exact) / shots as f64).sqrt();
        println!("{shots:>7} shots: {sampled:.6}  (|diff| = {:.2} se)", (sampled - exact).abs() / se.max(1e-12));
    }
    Ok(())
}

fn main() -> vqc::Result<()> {
    run_example()
}
