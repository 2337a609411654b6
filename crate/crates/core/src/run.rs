//! Run configuration, artifact persistence and the batch protocol.
//!
//! A training run writes into its output directory:
//!
//! | file               | contents                                            |
//! |--------------------|-----------------------------------------------------|
//! | `manifest.toml`    | fully resolved [`RunConfig`]; replays the run        |
//! | `model.toml`       | circuit config, θ, threshold, preprocessing reference |
//! | `preprocess.toml`  | fitted PCA and scaler                                |
//! | `loss_history.csv` | `iteration,loss`                                     |
//!
//! Evaluation writes `scores.csv`, `roc.csv` and `metrics.txt`. Batch runs put
//! one such directory per dataset under `dataset_NN/` and the combined ROC
//! and metrics at the top level.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::circuits::CircuitConfig;
use crate::classifier::{score_all, train, ClassifierModel, EvalMode, LossHistory};
use crate::data::{ingest_csv, Event, EventTable};
use crate::error::{Error, Result};
use crate::eval::{auc, bootstrap_auc_with, combine_rocs, roc_curve, ScoredSet};
use crate::noise::{build_calibration_matrix, calibrate_empirical, noisy_sampler, ReadoutError, ReadoutNoiseModel};
use crate::optimizer::SpsaConfig;
use crate::preprocess::{preprocess_fit, PreprocessModel};
use crate::seed::derive_seed;

pub const SCHEMA_VERSION: u32 = 1;

const SPLIT_STREAM: u64 = 0x0073_706c_6974;
const EVAL_STREAM: u64 = 0x6576_616c;
const BOOT_STREAM: u64 = 0x626f_6f74;
const CALIB_STREAM: u64 = 0x63_616c_6962;

pub const MANIFEST_FILE: &str = "manifest.toml";
pub const MODEL_FILE: &str = "model.toml";
pub const PREPROCESS_FILE: &str = "preprocess.toml";
pub const LOSS_FILE: &str = "loss_history.csv";
pub const SCORES_FILE: &str = "scores.csv";
pub const ROC_FILE: &str = "roc.csv";
pub const METRICS_FILE: &str = "metrics.txt";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeName {
    Exact,
    Sampled,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalSettings {
    pub mode: ModeName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shots: Option<u64>,
    #[serde(default)]
    pub mitigation: bool,
    /// Shots per basis state for an empirical calibration matrix; the
    /// analytic matrix of the noise model is used when unset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calibration_shots: Option<u64>,
}

impl Default for EvalSettings {
    fn default() -> Self {
        Self {
            mode: ModeName::Exact,
            shots: None,
            mitigation: false,
            calibration_shots: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitNoise {
    pub qubit: usize,
    pub p01: f64,
    pub p10: f64,
}

/// Readout flip probabilities: defaults for every measured qubit plus
/// optional per-qubit overrides.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSettings {
    pub p01: f64,
    pub p10: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub per_qubit: Vec<QubitNoise>,
}

impl NoiseSettings {
    pub fn model(&self, measured: &[usize]) -> Result<ReadoutNoiseModel> {
        let mut model = ReadoutNoiseModel::uniform(measured.iter().copied(), ReadoutError::new(self.p01, self.p10)?)?;
        for q in &self.per_qubit {
            model.set(q.qubit, ReadoutError::new(q.p01, q.p10)?)?;
        }
        Ok(model)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PreprocessSettings {
    /// Must equal the qubit count; defaults to it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_components: Option<usize>,
    #[serde(default)]
    pub standardize: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaluateSettings {
    #[serde(default = "default_bootstrap")]
    pub bootstrap: usize,
    #[serde(default)]
    pub stratified: bool,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
}

fn default_bootstrap() -> usize {
    1000
}

fn default_threshold() -> f64 {
    0.5
}

impl Default for EvaluateSettings {
    fn default() -> Self {
        Self {
            bootstrap: default_bootstrap(),
            stratified: false,
            threshold: default_threshold(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSpec {
    pub train: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub test: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Where events come from. Exactly one source is used, checked in this
/// order: `batch`/`datasets`, `input` + `n_train`, `train`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSettings {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub train: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub test: Option<PathBuf>,
    /// One CSV to be split by a seeded shuffle.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_train: Option<usize>,
    /// Batch manifest file listing dataset pairs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub batch: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub datasets: Vec<DatasetSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub seed: u64,
    pub circuit: CircuitConfig,
    #[serde(default)]
    pub eval: EvalSettings,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseSettings>,
    #[serde(default)]
    pub spsa: SpsaConfig,
    #[serde(default)]
    pub preprocess: PreprocessSettings,
    #[serde(default)]
    pub evaluate: EvaluateSettings,
    #[serde(default)]
    pub data: DataSettings,
}

/// Batch manifest: the dataset list for the multi-dataset protocol.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatchManifest {
    pub schema_version: u32,
    pub dataset: Vec<DatasetSpec>,
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn to_toml<T: Serialize>(value: &T) -> Result<String> {
    toml::to_string(value).map_err(|e| Error::Config(e.to_string()))
}

fn check_schema(version: u32) -> Result<()> {
    if version != SCHEMA_VERSION {
        return Err(Error::Config(format!(
            "unsupported schema_version {version}, expected {SCHEMA_VERSION}"
        )));
    }
    Ok(())
}

fn absolutize(base: &Path, path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        base.join(path)
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let config: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        check_schema(config.schema_version)?;
        Ok(config)
    }

    /// Reads a config file; relative data paths resolve against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let mut config = Self::parse(&read_text(path)?)?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        config.rebase(&base);
        Ok(config)
    }

    pub fn to_toml(&self) -> Result<String> {
        to_toml(self)
    }

    fn rebase(&mut self, base: &Path) {
        let d = &mut self.data;
        for p in [&mut d.train, &mut d.test, &mut d.input, &mut d.batch].into_iter().flatten() {
            *p = absolutize(base, p);
        }
        for ds in &mut d.datasets {
            ds.train = absolutize(base, &ds.train);
            if let Some(t) = &mut ds.test {
                *t = absolutize(base, t);
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_schema(self.schema_version)?;
        self.circuit.validate()?;
        self.spsa.validate()?;
        let k = self.preprocess.n_components.unwrap_or(self.circuit.n_qubits);
        if k != self.circuit.n_qubits {
            return Err(Error::Config(format!(
                "preprocess.n_components ({k}) must equal circuit.n_qubits ({})",
                self.circuit.n_qubits
            )));
        }
        if !(self.evaluate.threshold > 0.0 && self.evaluate.threshold < 1.0) {
            return Err(Error::Config("evaluate.threshold must lie in (0, 1)".into()));
        }
        if self.evaluate.bootstrap < 2 {
            return Err(Error::Config("evaluate.bootstrap must be >= 2".into()));
        }
        if self.eval.mode == ModeName::Exact && self.noise.is_some() {
            return Err(Error::Config("noise requires eval.mode = \"sampled\"".into()));
        }
        if self.eval.mode == ModeName::Sampled && self.eval.shots.is_none() {
            return Err(Error::Config("eval.mode = \"sampled\" requires eval.shots".into()));
        }
        if self.eval.mitigation && self.noise.is_none() {
            return Err(Error::Config("eval.mitigation requires a [noise] section".into()));
        }
        Ok(())
    }

    /// Fills defaults and inlines the batch manifest so the result replays
    /// the run on its own.
    pub fn resolved(&self) -> Result<Self> {
        self.validate()?;
        let mut out = self.clone();
        out.preprocess.n_components = Some(self.circuit.n_qubits);
        out.spsa.stability_a = Some(self.spsa.stability_offset());
        if let Some(batch) = out.data.batch.take() {
            let manifest = BatchManifest::load(&batch)?;
            out.data.datasets = manifest.dataset;
        }
        for (i, ds) in out.data.datasets.iter_mut().enumerate() {
            ds.seed.get_or_insert(derive_seed(self.seed, i as u64));
        }
        Ok(out)
    }

    pub fn is_batch(&self) -> bool {
        self.data.batch.is_some() || !self.data.datasets.is_empty()
    }

    /// Evaluation mode for the measured register of this circuit.
    pub fn eval_mode(&self) -> Result<EvalMode> {
        let (_, measured) = crate::circuits::build_measurement_prep(self.circuit.n_qubits)?;
        let mut mode = match self.eval.mode {
            ModeName::Exact => EvalMode::exact(),
            ModeName::Sampled => EvalMode::sampled(
                self.eval
                    .shots
                    .ok_or_else(|| Error::Config("sampled mode requires eval.shots".into()))?,
            ),
        };
        if let Some(noise) = &self.noise {
            mode = mode.with_noise(noise.model(&measured)?);
        }
        if self.eval.mitigation {
            let calibration = match (self.eval.calibration_shots, &mode.noise) {
                (Some(shots), Some(noise)) => {
                    let forward = build_calibration_matrix(noise, &measured)?;
                    Some(calibrate_empirical(
                        noisy_sampler(&forward),
                        &measured,
                        shots,
                        derive_seed(self.seed, CALIB_STREAM),
                    )?)
                }
                _ => None,
            };
            mode = mode.with_mitigation(calibration);
        }
        mode.validate()?;
        Ok(mode)
    }
}

impl BatchManifest {
    pub fn load(path: &Path) -> Result<Self> {
        let mut manifest: BatchManifest =
            toml::from_str(&read_text(path)?).map_err(|e| Error::Config(e.message().to_string()))?;
        check_schema(manifest.schema_version)?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        for ds in &mut manifest.dataset {
            ds.train = absolutize(&base, &ds.train);
            if let Some(t) = &mut ds.test {
                *t = absolutize(&base, t);
            }
        }
        Ok(manifest)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_text(path, &to_toml(self)?)
    }
}

/// On-disk model record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub schema_version: u32,
    /// Preprocessing model, relative to the model file's directory.
    pub preprocess: String,
    pub threshold: f64,
    pub circuit: CircuitConfig,
    pub theta: Vec<f64>,
}

/// A trained model directory loaded back into memory.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainedArtifact {
    pub model: ClassifierModel,
    pub preprocess: PreprocessModel,
    pub history: LossHistory,
}

impl TrainedArtifact {
    pub fn save(&self, dir: &Path) -> Result<()> {
        let record = ModelFile {
            schema_version: SCHEMA_VERSION,
            preprocess: PREPROCESS_FILE.to_string(),
            threshold: self.model.threshold,
            circuit: self.model.config.clone(),
            theta: self.model.theta.0.clone(),
        };
        write_text(&dir.join(MODEL_FILE), &to_toml(&record)?)?;
        write_text(&dir.join(PREPROCESS_FILE), &to_toml(&self.preprocess)?)?;
        let mut loss = Vec::new();
        self.history
            .write_csv(&mut loss)
            .map_err(|e| Error::io(dir.join(LOSS_FILE), e))?;
        fs::write(dir.join(LOSS_FILE), loss).map_err(|e| Error::io(dir.join(LOSS_FILE), e))
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let record: ModelFile = toml::from_str(&read_text(&dir.join(MODEL_FILE))?)
            .map_err(|e| Error::Config(e.message().to_string()))?;
        check_schema(record.schema_version)?;
        let preprocess: PreprocessModel = toml::from_str(&read_text(&dir.join(&record.preprocess))?)
            .map_err(|e| Error::Config(e.message().to_string()))?;
        let mut model = ClassifierModel::new(record.circuit, crate::circuits::ThetaVector(record.theta))?;
        model.threshold = record.threshold;
        model.validate()?;
        if preprocess.output_dim() != model.config.n_qubits {
            return Err(Error::Invalid(format!(
                "preprocessing emits {} values for {} qubits",
                preprocess.output_dim(),
                model.config.n_qubits
            )));
        }
        let history = read_loss_history(&dir.join(LOSS_FILE))?;
        Ok(Self {
            model,
            preprocess,
            history,
        })
    }
}

fn read_loss_history(path: &Path) -> Result<LossHistory> {
    let text = read_text(path)?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate().skip(1) {
        let parsed = line
            .split_once(',')
            .and_then(|(k, l)| Some((k.parse().ok()?, l.parse().ok()?)));
        match parsed {
            Some(row) => rows.push(row),
            None => {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("bad loss history row {line:?}"),
                })
            }
        }
    }
    Ok(LossHistory(rows))
}

fn project(table: &EventTable, preprocess: &PreprocessModel) -> Result<Vec<Event>> {
    if table.width() != preprocess.input_dim() {
        return Err(Error::Invalid(format!(
            "table has {} features, preprocessing expects {}",
            table.width(),
            preprocess.input_dim()
        )));
    }
    table
        .events
        .iter()
        .map(|e| {
            Ok(Event {
                label: e.label,
                features: preprocess.apply(&e.features)?,
            })
        })
        .collect()
}

/// Fits preprocessing on `train_table` only and trains the classifier.
pub fn fit_and_train(train_table: &EventTable, config: &RunConfig, seed: u64) -> Result<TrainedArtifact> {
    config.validate()?;
    if train_table.is_empty() {
        return Err(Error::Argument("training table is empty".into()));
    }
    let preprocess = preprocess_fit(&train_table.features(), config.circuit.n_qubits, config.preprocess.standardize)?;
    let events = project(train_table, &preprocess)?;
    let mode = config.eval_mode()?;
    let (mut model, history) = train(&events, &config.circuit, &config.spsa, &mode, seed)?;
    model.threshold = config.evaluate.threshold;
    Ok(TrainedArtifact {
        model,
        preprocess,
        history,
    })
}

/// Scores a table with a trained artifact.
pub fn score_table(artifact: &TrainedArtifact, table: &EventTable, mode: &EvalMode, seed: u64) -> Result<ScoredSet> {
    let events = project(table, &artifact.preprocess)?;
    let xs: Vec<Vec<f64>> = events.iter().map(|e| e.features.clone()).collect();
    let scores = score_all(&xs, &artifact.model, mode, seed)?;
    ScoredSet::new(scores, table.labels())
}

fn training_table(config: &RunConfig, seed: u64) -> Result<EventTable> {
    let data = &config.data;
    if let (Some(input), Some(n_train)) = (&data.input, data.n_train) {
        let (train, _) = ingest_csv(input)?.shuffle_split(n_train, derive_seed(seed, SPLIT_STREAM))?;
        return Ok(train);
    }
    match &data.train {
        Some(path) => ingest_csv(path),
        None => Err(Error::Config(
            "no training data: set data.train, data.input + data.n_train, or a batch".into(),
        )),
    }
}

fn test_table(config: &RunConfig, seed: u64) -> Result<EventTable> {
    let data = &config.data;
    if let Some(path) = &data.test {
        return ingest_csv(path);
    }
    if let (Some(input), Some(n_train)) = (&data.input, data.n_train) {
        let (_, test) = ingest_csv(input)?.shuffle_split(n_train, derive_seed(seed, SPLIT_STREAM))?;
        return Ok(test);
    }
    Err(Error::Config("no test data: pass a test CSV or set data.test".into()))
}

/// Per-dataset configs of a resolved batch run.
fn dataset_configs(resolved: &RunConfig) -> Vec<RunConfig> {
    resolved
        .data
        .datasets
        .iter()
        .map(|ds| {
            let mut single = resolved.clone();
            single.seed = ds.seed.expect("resolved datasets carry seeds");
            single.data = DataSettings {
                train: Some(ds.train.clone()),
                test: ds.test.clone(),
                ..DataSettings::default()
            };
            single
        })
        .collect()
}

pub fn dataset_dir(out: &Path, index: usize) -> PathBuf {
    out.join(format!("dataset_{index:02}"))
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Trains one model (or one per batch dataset) and writes the artifacts.
pub fn run_train(config: &RunConfig, out: &Path) -> Result<()> {
    let resolved = config.resolved()?;
    create_dir(out)?;
    write_text(&out.join(MANIFEST_FILE), &resolved.to_toml()?)?;
    if resolved.is_batch() {
        for (i, single) in dataset_configs(&resolved).iter().enumerate() {
            run_train(single, &dataset_dir(out, i))?;
        }
        return Ok(());
    }
    let table = training_table(&resolved, resolved.seed)?;
    fit_and_train(&table, &resolved, resolved.seed)?.save(out)
}

/// Evaluation summary written to `metrics.txt`.
#[derive(Clone, Debug, PartialEq)]
pub struct Metrics {
    pub auc: f64,
    pub auc_boot_mean: f64,
    pub auc_boot_std: f64,
    pub n_signal: usize,
    pub n_background: usize,
    pub loss_final: Option<f64>,
    /// Mean and sample std of per-dataset AUCs (batch runs only).
    pub dataset_auc: Option<(f64, f64, usize)>,
}

impl Metrics {
    pub fn compute(set: &ScoredSet, settings: &EvaluateSettings, seed: u64, loss_final: Option<f64>) -> Result<Self> {
        let boot = bootstrap_auc_with(set, settings.bootstrap, derive_seed(seed, BOOT_STREAM), settings.stratified)?;
        Ok(Self {
            auc: auc(set)?,
            auc_boot_mean: boot.mean,
            auc_boot_std: boot.std,
            n_signal: set.n_signal(),
            n_background: set.n_background(),
            loss_final,
            dataset_auc: None,
        })
    }

    /// `key: value` lines.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "auc: {:?}", self.auc);
        let _ = writeln!(s, "auc_boot_mean: {:?}", self.auc_boot_mean);
        let _ = writeln!(s, "auc_boot_std: {:?}", self.auc_boot_std);
        let _ = writeln!(s, "n_signal: {}", self.n_signal);
        let _ = writeln!(s, "n_background: {}", self.n_background);
        if let Some(loss) = self.loss_final {
            let _ = writeln!(s, "loss_final: {loss:?}");
        }
        match self.dataset_auc {
            Some((mean, std, n)) => {
                let _ = writeln!(s, "n_datasets: {n}");
                let _ = writeln!(s, "auc_dataset_mean: {mean:?}");
                let _ = writeln!(s, "auc_dataset_std: {std:?}");
                let _ = writeln!(s, "auc_summary: {mean:.2} ± {std:.2}");
            }
            None => {
                let _ = writeln!(s, "auc_summary: {:.2} ± {:.2}", self.auc, self.auc_boot_std);
            }
        }
        s
    }

    /// Reads the numeric keys back from `metrics.txt` text.
    pub fn parse_value(text: &str, key: &str) -> Option<f64> {
        text.lines()
            .filter_map(|l| l.split_once(": "))
            .find(|(k, _)| *k == key)
            .and_then(|(_, v)| v.trim().parse().ok())
    }
}

fn write_scores(path: &Path, set: &ScoredSet) -> Result<()> {
    let mut s = String::from("label,score\n");
    for (label, score) in set.labels().iter().zip(set.scores()) {
        let _ = writeln!(s, "{label},{score:?}");
    }
    write_text(path, &s)
}

/// Reads a `label,score` file written by an evaluation.
pub fn read_scores(path: &Path) -> Result<ScoredSet> {
    let text = read_text(path)?;
    let mut scores = Vec::new();
    let mut labels = Vec::new();
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == "label,score" => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                message: "expected header \"label,score\"".into(),
            })
        }
    }
    for (i, line) in lines {
        let row = line.split_once(',').and_then(|(l, s)| {
            let label = match l.trim() {
                "0" => 0,
                "1" => 1,
                _ => return None,
            };
            Some((label, s.trim().parse::<f64>().ok()?))
        });
        let Some((label, score)) = row else {
            return Err(Error::Parse {
                line: i + 1,
                message: format!("bad score row {line:?}"),
            });
        };
        labels.push(label);
        scores.push(score);
    }
    ScoredSet::new(scores, labels)
}

fn write_roc_and_metrics(out: &Path, set: &ScoredSet, metrics: &Metrics, sets: &[ScoredSet]) -> Result<()> {
    let curve = if sets.len() > 1 { combine_rocs(sets)? } else { roc_curve(set)? };
    let mut roc = Vec::new();
    curve.write_csv(&mut roc).map_err(|e| Error::io(out.join(ROC_FILE), e))?;
    fs::write(out.join(ROC_FILE), roc).map_err(|e| Error::io(out.join(ROC_FILE), e))?;
    write_text(&out.join(METRICS_FILE), &metrics.render())
}

/// Scores the test events with a trained artifact and writes scores, ROC
/// points and metrics. `test` overrides the configured test source.
pub fn run_evaluate(config: &RunConfig, model_dir: &Path, test: Option<&Path>, out: &Path) -> Result<Metrics> {
    let resolved = config.resolved()?;
    create_dir(out)?;
    if resolved.is_batch() {
        if test.is_some() {
            return Err(Error::Config("a test file override cannot be combined with a batch".into()));
        }
        let mut sets = Vec::new();
        let mut aucs = Vec::new();
        let mut losses = Vec::new();
        for (i, single) in dataset_configs(&resolved).iter().enumerate() {
            let m = run_evaluate(single, &dataset_dir(model_dir, i), None, &dataset_dir(out, i))?;
            aucs.push(m.auc);
            losses.extend(m.loss_final);
            sets.push(read_scores(&dataset_dir(out, i).join(SCORES_FILE))?);
        }
        let combined = ScoredSet::concat(&sets);
        let mean_loss = (!losses.is_empty()).then(|| losses.iter().sum::<f64>() / losses.len() as f64);
        let mut metrics = Metrics::compute(&combined, &resolved.evaluate, resolved.seed, mean_loss)?;
        let n = aucs.len();
        let mean = aucs.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (aucs.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0)).sqrt()
        } else {
            0.0
        };
        metrics.dataset_auc = Some((mean, std, n));
        write_scores(&out.join(SCORES_FILE), &combined)?;
        write_roc_and_metrics(out, &combined, &metrics, &sets)?;
        return Ok(metrics);
    }

    let artifact = TrainedArtifact::load(model_dir)?;
    let table = match test {
        Some(path) => ingest_csv(path)?,
        None => test_table(&resolved, resolved.seed)?,
    };
    let mode = resolved.eval_mode()?;
    let set = score_table(&artifact, &table, &mode, derive_seed(resolved.seed, EVAL_STREAM))?;
    let metrics = Metrics::compute(&set, &resolved.evaluate, resolved.seed, artifact.history.last())?;
    write_scores(&out.join(SCORES_FILE), &set)?;
    write_roc_and_metrics(out, &set, &metrics, std::slice::from_ref(&set))?;
    Ok(metrics)
}

/// ROC and metrics from one or more score files, combined.
pub fn run_roc(score_files: &[PathBuf], settings: &EvaluateSettings, seed: u64, out: &Path) -> Result<Metrics> {
    if score_files.is_empty() {
        return Err(Error::Argument("no score files given".into()));
    }
    let sets = score_files.iter().map(|p| read_scores(p)).collect::<Result<Vec<_>>>()?;
    let combined = ScoredSet::concat(&sets);
    let metrics = Metrics::compute(&combined, settings, seed, None)?;
    create_dir(out)?;
    write_roc_and_metrics(out, &combined, &metrics, &sets)?;
    Ok(metrics)
}

/// Writes `count` synthetic (train, test) pairs and a batch manifest listing
/// them with seeds derived from `seed`. Returns the manifest path.
pub fn generate_batch(
    out: &Path,
    count: usize,
    n_train: usize,
    n_test: usize,
    d: usize,
    separation: f64,
    seed: u64,
) -> Result<PathBuf> {
    if count == 0 {
        return Err(Error::Argument("dataset count must be >= 1".into()));
    }
    create_dir(out)?;
    let mut datasets = Vec::with_capacity(count);
    for i in 0..count {
        let data_seed = derive_seed(seed, i as u64);
        let table = crate::data::gen_synthetic(n_train + n_test, d, separation, data_seed)?;
        let (train, test) = table.shuffle_split(n_train, derive_seed(data_seed, SPLIT_STREAM))?;
        let train_name = format!("dataset_{i:02}_train.csv");
        let test_name = format!("dataset_{i:02}_test.csv");
        train.save(&out.join(&train_name))?;
        test.save(&out.join(&test_name))?;
        datasets.push(DatasetSpec {
            train: PathBuf::from(train_name),
            test: Some(PathBuf::from(test_name)),
            seed: Some(data_seed),
        });
    }
    let manifest = BatchManifest {
        schema_version: SCHEMA_VERSION,
        dataset: datasets,
    };
    let path = out.join("batch.toml");
    manifest.save(&path)?;
    Ok(path)
}
