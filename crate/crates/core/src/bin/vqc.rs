use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use vqc::data::gen_synthetic;
use vqc::run::{self, EvaluateSettings, RunConfig, MANIFEST_FILE};
use vqc::Error;

#[derive(Parser)]
#[command(name = "vqc", version, about = "Variational quantum classifier batch runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic two-Gaussian event CSV, or a batch of train/test pairs.
    GenData {
        #[arg(long, default_value_t = 200)]
        events: usize,
        #[arg(long, default_value_t = 10)]
        features: usize,
        #[arg(long, default_value_t = 1.0)]
        separation: f64,
        /// Write this many (train, test) pairs plus batch.toml instead of one file.
        #[arg(long)]
        datasets: Option<usize>,
        #[arg(long, default_value_t = 100)]
        train: usize,
        #[arg(long, default_value_t = 100)]
        test: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit preprocessing and train the classifier.
    Train {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score test events with a trained model; writes ROC points and metrics.
    Evaluate {
        /// Defaults to the model directory's manifest.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        test: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Combined ROC curve and AUC from one or more `label,score` files.
    Roc {
        #[arg(long = "scores", required = true)]
        scores: Vec<PathBuf>,
        #[arg(long, default_value_t = 1000)]
        bootstrap: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn load_config(path: &Path, seed: Option<u64>) -> vqc::Result<RunConfig> {
    let mut config = RunConfig::load(path)?;
    if let Some(seed) = seed {
        config.seed = seed;
    }
    Ok(config)
}

fn execute(cli: Cli) -> vqc::Result<String> {
    match cli.command {
        Command::GenData {
            events,
            features,
            separation,
            datasets,
            train,
            test,
            seed,
            out,
        } => match datasets {
            Some(count) => {
                let manifest = run::generate_batch(&out, count, train, test, features, separation, seed)?;
                Ok(format!("wrote {count} datasets, manifest {}", manifest.display()))
            }
            None => {
                std::fs::create_dir_all(&out).map_err(|e| Error::Io { path: out.clone(), source: e })?;
                let path = out.join("events.csv");
                gen_synthetic(events, features, separation, seed)?.save(&path)?;
                Ok(format!("wrote {}", path.display()))
            }
        },
        Command::Train { config, seed, out } => {
            run::run_train(&load_config(&config, seed)?, &out)?;
            Ok(format!("trained into {}", out.display()))
        }
        Command::Evaluate {
            config,
            model,
            test,
            seed,
            out,
        } => {
            let config_path = config.unwrap_or_else(|| model.join(MANIFEST_FILE));
            let metrics = run::run_evaluate(&load_config(&config_path, seed)?, &model, test.as_deref(), &out)?;
            Ok(metrics.render())
        }
        Command::Roc {
            scores,
            bootstrap,
            seed,
            out,
        } => {
            let settings = EvaluateSettings {
                bootstrap,
                ..EvaluateSettings::default()
            };
            Ok(run::run_roc(&scores, &settings, seed, &out)?.render())
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(message) => {
            print!("{message}");
            if !message.ends_with('\n') {
                println!();
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error[{}]: {}", e.category(), e.to_string().replace('\n', " "));
            ExitCode::FAILURE
        }
    }
}
