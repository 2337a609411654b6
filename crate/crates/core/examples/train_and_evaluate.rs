//! Fit preprocessing, train with SPSA and evaluate on held-out events, all
//! through the library API.

use vqc::data::gen_synthetic;
use vqc::eval::roc_curve;
use vqc::run::{fit_and_train, score_table, Metrics, RunConfig};

const CONFIG: &str = r#"
schema_version = 1
seed = 8

[circuit]
n_qubits = 4
feature_map_depth = 1
var_depth = 1

[spsa]
max_iter = 40

[evaluate]
bootstrap = 300
"#;

pub fn run_example() -> vqc::Result<()> {
    let config = RunConfig::parse(CONFIG)?;
    let table = gen_synthetic(160, 6, 1.2, 4)?;
    let (train, test) = table.shuffle_split(80, 5)?;

    let artifact = fit_and_train(&train, &config, config.seed)?;
    let history = &artifact.history;
    println!(
        "loss: initial {:.4}, final {:.4} over {} iterations",
        history.initial().unwrap_or(f64::NAN),
        history.last().unwrap_or(f64::NAN),
        history.len() - 1
    );

    let scored = score_table(&artifact, &test, &config.eval_mode()?, 1)?;
    let metrics = Metrics::compute(&scored, &config.evaluate, config.seed, history.last())?;
    print!("{}", metrics.render());
    println!("{} ROC points", roc_curve(&scored)?.points.len());
    Ok(())
}

fn main() -> vqc::Result<()> {
    run_example()
}
