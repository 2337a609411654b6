//! ROC curves in the (signal efficiency, background rejection) plane, AUC
//! and bootstrap AUC uncertainty.

use std::io::Write;

use rand::Rng;

use crate::error::{Error, Result};
use crate::seed;

/// Retries allowed per bootstrap replica when a draw misses a class.
pub const BOOTSTRAP_RETRY_CAP: usize = 100;

/// Classifier scores paired with truth labels (1 signal, 0 background).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ScoredSet {
    scores: Vec<f64>,
    labels: Vec<u8>,
}

impl ScoredSet {
    pub fn new(scores: Vec<f64>, labels: Vec<u8>) -> Result<Self> {
        if scores.len() != labels.len() {
            return Err(Error::Shape(format!(
                "{} scores but {} labels",
                scores.len(),
                labels.len()
            )));
        }
        if labels.iter().any(|&l| l > 1) {
            return Err(Error::Argument("labels must be 0 or 1".into()));
        }
        if scores.iter().any(|s| s.is_nan()) {
            return Err(Error::Argument("scores must not be NaN".into()));
        }
        Ok(Self { scores, labels })
    }

    /// Builds a set from separate signal and background score lists.
    pub fn from_classes(signal: &[f64], background: &[f64]) -> Result<Self> {
        let scores = signal.iter().chain(background).copied().collect();
        let labels = std::iter::repeat_n(1, signal.len())
            .chain(std::iter::repeat_n(0, background.len()))
            .collect();
        Self::new(scores, labels)
    }

    pub fn concat<'a>(sets: impl IntoIterator<Item = &'a ScoredSet>) -> Self {
        let mut out = ScoredSet::default();
        for s in sets {
            out.scores.extend_from_slice(&s.scores);
            out.labels.extend_from_slice(&s.labels);
        }
        out
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn n_signal(&self) -> usize {
        self.labels.iter().filter(|&&l| l == 1).count()
    }

    pub fn n_background(&self) -> usize {
        self.len() - self.n_signal()
    }

    fn require_both_classes(&self) -> Result<()> {
        if self.n_signal() == 0 || self.n_background() == 0 {
            return Err(Error::Argument(
                "ROC/AUC needs at least one signal and one background event".into(),
            ));
        }
        Ok(())
    }

    /// Returns (score, signal count, background count) per distinct score, descending.
    fn grouped_descending(&self) -> Vec<(f64, usize, usize)> {
        let mut pairs: Vec<(f64, u8)> = self.scores.iter().copied().zip(self.labels.iter().copied()).collect();
        pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut groups: Vec<(f64, usize, usize)> = Vec::new();
        for (score, label) in pairs {
            match groups.last_mut() {
                Some(g) if g.0 == score => {
                    if label == 1 {
                        g.1 += 1;
                    } else {
                        g.2 += 1;
                    }
                }
                _ => groups.push((score, usize::from(label == 1), usize::from(label == 0))),
            }
        }
        groups
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RocPoint {
    /// Events are called signal when `score > threshold`.
    pub threshold: f64,
    pub signal_efficiency: f64,
    pub background_rejection: f64,
    /// Signal events above the threshold.
    pub true_positives: usize,
    /// Background events at or below the threshold.
    pub true_negatives: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
    pub n_signal: usize,
    pub n_background: usize,
}

impl RocCurve {
    /// Trapezoidal area under TPR as a function of FPR = 1 − rejection.
    pub fn trapezoid_area(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| {
                let dx = (1.0 - w[1].background_rejection) - (1.0 - w[0].background_rejection);
                dx * (w[0].signal_efficiency + w[1].signal_efficiency) / 2.0
            })
            .sum()
    }

    /// Writes `threshold,signal_efficiency,background_rejection` rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "threshold,signal_efficiency,background_rejection")?;
        for p in &self.points {
            writeln!(out, "{},{},{}", p.threshold, p.signal_efficiency, p.background_rejection)?;
        }
        Ok(())
    }
}

/// Threshold sweep from `+inf` through each distinct score (descending) to `-inf`.
pub fn roc_curve(set: &ScoredSet) -> Result<RocCurve> {
    set.require_both_classes()?;
    let n_signal = set.n_signal();
    let n_background = set.n_background();
    let point = |threshold, tp: usize, tn: usize| RocPoint {
        threshold,
        signal_efficiency: tp as f64 / n_signal as f64,
        background_rejection: tn as f64 / n_background as f64,
        true_positives: tp,
        true_negatives: tn,
    };

    let mut points = vec![point(f64::INFINITY, 0, n_background)];
    let (mut tp, mut fp) = (0usize, 0usize);
    for (score, sig, bkg) in set.grouped_descending() {
        // at t = score, events strictly above have been counted already
        points.push(point(score, tp, n_background - fp));
        tp += sig;
        fp += bkg;
    }
    points.push(point(f64::NEG_INFINITY, n_signal, 0));
    Ok(RocCurve {
        points,
        n_signal,
        n_background,
    })
}

/// Signal/background pair comparison counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PairCounts {
    pub wins: u64,
    pub ties: u64,
    pub pairs: u64,
}

impl PairCounts {
    pub fn auc(&self) -> f64 {
        (2 * self.wins + self.ties) as f64 / (2 * self.pairs) as f64
    }
}

/// Counts pairs where the signal score beats, or ties, the background score.
pub fn mann_whitney_counts(set: &ScoredSet) -> Result<PairCounts> {
    set.require_both_classes()?;
    let mut background_below = set.n_background() as u64;
    let (mut wins, mut ties) = (0u64, 0u64);
    for (_, sig, bkg) in set.grouped_descending() {
        background_below -= bkg as u64;
        wins += sig as u64 * background_below;
        ties += (sig * bkg) as u64;
    }
    Ok(PairCounts {
        wins,
        ties,
        pairs: (set.n_signal() * set.n_background()) as u64,
    })
}

/// Mann-Whitney AUC with ties counted as one half.
pub fn auc(set: &ScoredSet) -> Result<f64> {
    Ok(mann_whitney_counts(set)?.auc())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BootstrapSummary {
    pub mean: f64,
    pub std: f64,
    pub replicas: usize,
}

/// Joint (score, label) resampling; see [`bootstrap_auc_with`] for stratified draws.
pub fn bootstrap_auc(set: &ScoredSet, replicas: usize, seed: u64) -> Result<BootstrapSummary> {
    bootstrap_auc_with(set, replicas, seed, false)
}

/// Bootstrap AUC mean and sample standard deviation. Stratified mode
/// resamples each class separately with its original size.
pub fn bootstrap_auc_with(
    set: &ScoredSet,
    replicas: usize,
    seed: u64,
    stratified: bool,
) -> Result<BootstrapSummary> {
    bootstrap_inner(set, replicas, seed, stratified, BOOTSTRAP_RETRY_CAP)
}

fn bootstrap_inner(
    set: &ScoredSet,
    replicas: usize,
    seed: u64,
    stratified: bool,
    retry_cap: usize,
) -> Result<BootstrapSummary> {
    if replicas < 2 {
        return Err(Error::Argument("bootstrap needs at least 2 replicas".into()));
    }
    set.require_both_classes()?;
    let n = set.len();
    let signal: Vec<usize> = (0..n).filter(|&i| set.labels[i] == 1).collect();
    let background: Vec<usize> = (0..n).filter(|&i| set.labels[i] == 0).collect();

    let mut values = Vec::with_capacity(replicas);
    let mut scores = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for r in 0..replicas {
        let mut rng = seed::rng(seed::derive_seed(seed, r as u64));
        let mut attempt = 0;
        loop {
            scores.clear();
            labels.clear();
            if stratified {
                for pool in [&signal, &background] {
                    for _ in 0..pool.len() {
                        let i = pool[rng.random_range(0..pool.len())];
                        scores.push(set.scores[i]);
                        labels.push(set.labels[i]);
                    }
                }
            } else {
                for _ in 0..n {
                    let i = rng.random_range(0..n);
                    scores.push(set.scores[i]);
                    labels.push(set.labels[i]);
                }
            }
            if labels.contains(&0) && labels.contains(&1) {
                break;
            }
            attempt += 1;
            if attempt >= retry_cap {
                return Err(Error::DegenerateSample(format!(
                    "replica {r} drew a single class {retry_cap} times"
                )));
            }
        }
        let resample = ScoredSet {
            scores: scores.clone(),
            labels: labels.clone(),
        };
        values.push(auc(&resample)?);
    }
    let mean = values.iter().sum::<f64>() / replicas as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (replicas as f64 - 1.0);
    Ok(BootstrapSummary {
        mean,
        std: var.sqrt(),
        replicas,
    })
}

/// Pools every event of every set into one ROC curve.
pub fn combine_rocs(sets: &[ScoredSet]) -> Result<RocCurve> {
    if sets.is_empty() || sets.iter().any(ScoredSet::is_empty) {
        return Err(Error::Argument("every set to combine must be non-empty".into()));
    }
    roc_curve(&ScoredSet::concat(sets))
}
