//! Labeled event tables: CSV ingestion, CSV export and a seeded synthetic
//! two-Gaussian generator.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand_distr::{Distribution, StandardNormal};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::seed;

/// One event: truth label (1 signal, 0 background) and its features.
#[derive(Clone, Debug, PartialEq)]
pub struct Event {
    pub label: u8,
    pub features: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EventTable {
    pub feature_names: Vec<String>,
    pub events: Vec<Event>,
}

impl EventTable {
    pub fn new(feature_names: Vec<String>, events: Vec<Event>) -> Result<Self> {
        let d = feature_names.len();
        for (i, e) in events.iter().enumerate() {
            if e.features.len() != d {
                return Err(Error::Shape(format!(
                    "event {i} has {} features, header has {d}",
                    e.features.len()
                )));
            }
            if e.label > 1 {
                return Err(Error::Invalid(format!("event {i} has label {}", e.label)));
            }
            if e.features.iter().any(|v| !v.is_finite()) {
                return Err(Error::Invalid(format!("event {i} has a non-finite feature")));
            }
        }
        Ok(Self {
            feature_names,
            events,
        })
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn width(&self) -> usize {
        self.feature_names.len()
    }

    pub fn features(&self) -> Vec<Vec<f64>> {
        self.events.iter().map(|e| e.features.clone()).collect()
    }

    pub fn labels(&self) -> Vec<u8> {
        self.events.iter().map(|e| e.label).collect()
    }

    /// Seeded shuffle, then the first `n_train` events become the training table.
    pub fn shuffle_split(&self, n_train: usize, seed: u64) -> Result<(EventTable, EventTable)> {
        if n_train == 0 || n_train >= self.len() {
            return Err(Error::Argument(format!(
                "train size {n_train} must be in 1..{}",
                self.len()
            )));
        }
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.shuffle(&mut seed::rng(seed));
        let pick = |idx: &[usize]| EventTable {
            feature_names: self.feature_names.clone(),
            events: idx.iter().map(|&i| self.events[i].clone()).collect(),
        };
        Ok((pick(&order[..n_train]), pick(&order[n_train..])))
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let header = std::iter::once("label").chain(self.feature_names.iter().map(String::as_str));
        w.write_record(header).map_err(csv_io)?;
        for e in &self.events {
            let row = std::iter::once(e.label.to_string())
                .chain(e.features.iter().map(|v| format!("{v:?}")));
            w.write_record(row).map_err(csv_io)?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(BufWriter::new(file))
    }
}

fn csv_io(e: csv::Error) -> Error {
    Error::io("<csv>", std::io::Error::other(e))
}

/// Parses the event CSV format: a header whose first column is `label`,
/// followed by numeric feature columns.
pub fn parse_csv<R: std::io::Read>(input: R) -> Result<EventTable> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(input);
    let mut records = reader.records();
    let header = match records.next() {
        Some(r) => r.map_err(|e| Error::Parse {
            line: 1,
            message: e.to_string(),
        })?,
        None => {
            return Err(Error::Parse {
                line: 1,
                message: "file is empty".into(),
            })
        }
    };
    if header.get(0).map(str::trim) != Some("label") {
        return Err(Error::Parse {
            line: 1,
            message: "first column must be named \"label\"".into(),
        });
    }
    let feature_names: Vec<String> = header.iter().skip(1).map(|s| s.trim().to_string()).collect();
    if feature_names.is_empty() {
        return Err(Error::Parse {
            line: 1,
            message: "no feature columns".into(),
        });
    }

    let mut events = Vec::new();
    for record in records {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map(|p| p.line() as usize).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        if record.len() != feature_names.len() + 1 {
            return Err(Error::Parse {
                line,
                message: format!("expected {} columns, found {}", feature_names.len() + 1, record.len()),
            });
        }
        let label = match record[0].trim() {
            "0" => 0,
            "1" => 1,
            other => {
                return Err(Error::Validation {
                    line,
                    message: format!("label must be 0 or 1, got {other:?}"),
                })
            }
        };
        let mut features = Vec::with_capacity(feature_names.len());
        for (col, cell) in record.iter().enumerate().skip(1) {
            let value: f64 = cell.trim().parse().map_err(|_| Error::Parse {
                line,
                message: format!("column {} is not a number: {cell:?}", col + 1),
            })?;
            if !value.is_finite() {
                return Err(Error::Validation {
                    line,
                    message: format!("column {} is not finite: {cell:?}", col + 1),
                });
            }
            features.push(value);
        }
        events.push(Event { label, features });
    }
    Ok(EventTable {
        feature_names,
        events,
    })
}

pub fn ingest_csv(path: &Path) -> Result<EventTable> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_csv(std::io::BufReader::new(file))
}

/// Balanced two-Gaussian sample: the first `n_events / 2` events are signal
/// centered at `+separation/2` on every axis, the rest background at
/// `-separation/2`; both have unit covariance.
pub fn gen_synthetic(n_events: usize, d: usize, separation: f64, seed: u64) -> Result<EventTable> {
    if n_events < 2 || d < 1 {
        return Err(Error::Argument(format!(
            "need n_events >= 2 and d >= 1, got {n_events} and {d}"
        )));
    }
    if !(separation.is_finite() && separation >= 0.0) {
        return Err(Error::Argument(format!("separation must be >= 0, got {separation}")));
    }
    let mut rng = seed::rng(seed);
    let n_signal = n_events / 2;
    let events = (0..n_events)
        .map(|i| {
            let label = u8::from(i < n_signal);
            let shift = if label == 1 { separation / 2.0 } else { -separation / 2.0 };
            let features = (0..d)
                .map(|_| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    z + shift
                })
                .collect();
            Event { label, features }
        })
        .collect();
    Ok(EventTable {
        feature_names: (0..d).map(|j| format!("x{j}")).collect(),
        events,
    })
}

/// Best achievable AUC for [`gen_synthetic`] data: `Φ(separation · √d / 2)`.
pub fn bayes_auc(separation: f64, d: usize) -> f64 {
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    normal.cdf(separation * (d as f64).sqrt() / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_file() {
        let t = parse_csv("label,a,b\n1,0.5,2\n0,-1,3e-2\n".as_bytes()).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.width(), 2);
        assert_eq!(t.events[1].features, vec![-1.0, 0.03]);
    }

    #[test]
    fn rejects_bad_cells() {
        let err = parse_csv("label,a\n1,0.5\n0,NaN\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Validation { line: 3, .. }), "{err}");
        let err = parse_csv("label,a\n2,0.5\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Validation { line: 2, .. }), "{err}");
        let err = parse_csv("label,a\n1,abc\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = parse_csv("label,a\n1,0.5,3\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = parse_csv("y,a\n1,0.5\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
    }

    #[test]
    fn synthetic_is_balanced_and_deterministic() {
        let t = gen_synthetic(200, 10, 0.4, 9).unwrap();
        assert_eq!(t.len(), 200);
        assert_eq!(t.labels().iter().filter(|&&l| l == 1).count(), 100);
        let mut a = Vec::new();
        let mut b = Vec::new();
        t.write_csv(&mut a).unwrap();
        gen_synthetic(200, 10, 0.4, 9).unwrap().write_csv(&mut b).unwrap();
        assert_eq!(a, b);
        assert_eq!(parse_csv(a.as_slice()).unwrap(), t);
        assert!(gen_synthetic(1, 3, 0.0, 0).is_err());
        assert!(gen_synthetic(4, 0, 0.0, 0).is_err());
    }

    #[test]
    fn bayes_ceiling() {
        assert!((bayes_auc(0.4, 10) - 0.7364).abs() < 1e-3);
        assert!((bayes_auc(1.2, 10) - 0.9707).abs() < 1e-3);
        assert_eq!(bayes_auc(0.0, 5), 0.5);
    }

    #[test]
    fn split_partitions_events() {
        let t = gen_synthetic(20, 2, 1.0, 1).unwrap();
        let (train, test) = t.shuffle_split(12, 4).unwrap();
        assert_eq!((train.len(), test.len()), (12, 8));
        assert_eq!(t.shuffle_split(12, 4).unwrap(), (train, test));
        assert!(t.shuffle_split(20, 4).is_err());
    }
}
