#[allow(dead_code)]
#[path = "../examples/simulate_circuit.rs"]
mod simulate_circuit;

#[allow(dead_code)]
#[path = "../examples/classifier_circuit.rs"]
mod classifier_circuit;

#[allow(dead_code)]
#[path = "../examples/spsa_quadratic.rs"]
mod spsa_quadratic;

#[allow(dead_code)]
#[path = "../examples/readout_mitigation.rs"]
mod readout_mitigation;

#[allow(dead_code)]
#[path = "../examples/pca_scaling.rs"]
mod pca_scaling;

#[allow(dead_code)]
#[path = "../examples/roc_auc.rs"]
mod roc_auc;

#[allow(dead_code)]
#[path = "../examples/train_and_evaluate.rs"]
mod train_and_evaluate;

#[allow(dead_code)]
#[path = "../examples/ten_dataset_protocol.rs"]
mod ten_dataset_protocol;


#[test]
fn simulate_circuit_runs() {
    simulate_circuit::run_example().unwrap();
}

#[test]
fn classifier_circuit_runs() {
    classifier_circuit::run_example().unwrap();
}

#[test]
fn spsa_quadratic_runs() {
    spsa_quadratic::run_example().unwrap();
}

#[test]
fn readout_mitigation_runs() {
    readout_mitigation::run_example().unwrap();
}

#[test]
fn pca_scaling_runs() {
    pca_scaling::run_example().unwrap();
}

#[test]
fn roc_auc_runs() {
    roc_auc::run_example().unwrap();
}

#[test]
fn train_and_evaluate_runs() {
    train_and_evaluate::run_example().unwrap();
}

#[test]
fn ten_dataset_protocol_runs() {
    ten_dataset_protocol::run_example().unwrap();
}
