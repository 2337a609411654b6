//! The multi-dataset protocol: generate ten (train, test) pairs, train one
//! model per pair and combine every test event into one ROC.

use vqc::run::{generate_batch, run_evaluate, run_train, RunConfig};

pub fn run_example() -> vqc::Result<()> {
    let work = tempfile::tempdir().expect("temporary directory");
    let data = work.path().join("data");
    let batch = generate_batch(&data, 10, 40, 40, 13, 1.0, 77)?;

    let config = RunConfig::parse(&format!(
        r#"
schema_version = 1
seed = 77

[circuit]
n_qubits = 2
feature_map_depth = 1
var_depth = 1

[spsa]
max_iter = 10

[evaluate]
bootstrap = 200

[data]
batch = "{}"
"#,
        batch.display()
    ))?;
    let models = work.path().join("models");
    run_train(&config, &models)?;
    let metrics = run_evaluate(&config, &models, None, &work.path().join("eval"))?;
    print!("{}", metrics.render());
    Ok(())
}

fn main() -> vqc::Result<()> {
    run_example()
}
