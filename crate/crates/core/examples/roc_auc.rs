//! ROC curve, Mann-Whitney AUC and bootstrap uncertainty for a toy score set.

use vqc::eval::{bootstrap_auc, mann_whitney_counts, roc_curve, ScoredSet};

pub fn run_example() -> vqc::Result<()> {
    let signal = [0.91, 0.85, 0.77, 0.62, 0.62, 0.55, 0.40, 0.33];
    let background = [0.70, 0.62, 0.48, 0.41, 0.30, 0.22, 0.15, 0.05];
    let set = ScoredSet::from_classes(&signal, &background)?;

    let curve = roc_curve(&set)?;
    let mut csv = Vec::new();
    curve.write_csv(&mut csv).expect("writing to memory");
    print!("{}", String::from_utf8_lossy(&csv));

    let pairs = mann_whitney_counts(&set)?;
    println!(
        "wins {} ties {} of {} pairs -> AUC {:.4} (trapezoid {:.4})",
        pairs.wins,
        pairs.ties,
        pairs.pairs,
        pairs.auc(),
        curve.trapezoid_area()
    );
    let boot = bootstrap_auc(&set, 1000, 3)?;
    println!("bootstrap: {:.3} ± {:.3}", boot.mean, boot.std);
    Ok(())
}

fn main() -> vqc::Result<()> {
    run_example()
}
