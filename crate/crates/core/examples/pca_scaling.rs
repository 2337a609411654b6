//! Compress 10 features to 4 with PCA and scale each onto [−π, π].

use vqc::data::gen_synthetic;
use vqc::preprocess::preprocess_fit;

pub fn run_example() -> vqc::Result<()> {
    let table = gen_synthetic(200, 10, 1.0, 1)?;
    let (train, test) = table.shuffle_split(100, 2)?;
    let model = preprocess_fit(&train.features(), 4, false)?;

    let total: f64 = model.pca.explained_variance.iter().sum();
    println!("explained variance (top 4): {:?}", model.pca.explained_variance);
    println!("first component: {:?}", model.pca.components[0]);
    println!("kept variance {total:.3}");

    let angles: Vec<Vec<f64>> = test.features().iter().map(|r| model.apply(r)).collect::<vqc::Result<_>>()?;
    let (lo, hi) = angles
        .iter()
        .flatten()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    println!("test angles span [{lo:.3}, {hi:.3}] (values outside [−π, π] extrapolate)");
    println!("{}", toml::to_string(&model.scaler).expect("scaler serializes"));
    Ok(())
}

fn main() -> vqc::Result<()> {
    run_example()
}
