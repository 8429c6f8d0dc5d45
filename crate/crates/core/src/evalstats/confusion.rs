use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::{Label, Manifest, Split};
use crate::error::{Error, Result};

/// Abnormal is the positive class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    #[serde(rename = "TP")]
    pub tp: u64,
    #[serde(rename = "FP")]
    pub fp: u64,
    #[serde(rename = "TN")]
    pub tn: u64,
    #[serde(rename = "FN")]
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn record(&mut self, truth: Label, predicted: Label) {
        match (truth.is_positive(), predicted.is_positive()) {
            (true, true) => self.tp += 1,
            (true, false) => self.fn_ += 1,
            (false, false) => self.tn += 1,
            (false, true) => self.fp += 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub acc: f64,
    pub se: f64,
    pub sp: f64,
    pub macc: f64,
    pub counts: ConfusionCounts,
}

/// Accuracy, sensitivity, specificity and their mean.
///
/// Each value is the exact ratio of integers rounded once, so `macc` can sit
/// one ulp away from `(se + sp) / 2` evaluated in floating point.
pub fn metrics(c: ConfusionCounts) -> Result<MetricsReport> {
    let pos = c.tp + c.fn_;
    let neg = c.tn + c.fp;
    if pos == 0 {
        return Err(Error::UndefinedRate("no positive (abnormal) cases".into()));
    }
    if neg == 0 {
        return Err(Error::UndefinedRate("no negative (normal) cases".into()));
    }
    let macc_num = c.tp as u128 * neg as u128 + c.tn as u128 * pos as u128;
    let macc_den = 2 * pos as u128 * neg as u128;
    Ok(MetricsReport {
        acc: (c.tp + c.tn) as f64 / c.total() as f64,
        se: c.tp as f64 / pos as f64,
        sp: c.tn as f64 / neg as f64,
        macc: macc_num as f64 / macc_den as f64,
        counts: c,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    pub segment_id: String,
    pub predicted: Label,
}

/// Join predictions to the ground truth of one split.
///
/// Predictions for segments outside `split` are ignored. Every segment of
/// `split` must be predicted exactly once.
pub fn confusion(
    predictions: &[Prediction],
    manifest: &Manifest,
    split: Split,
) -> Result<ConfusionCounts> {
    let truth: BTreeMap<&str, Label> = manifest
        .in_split(split)
        .map(|s| (s.segment_id.as_str(), s.label))
        .collect();
    let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
    let mut counts = ConfusionCounts::default();
    for p in predictions {
        if let Some(&label) = truth.get(p.segment_id.as_str()) {
            *seen.entry(p.segment_id.as_str()).or_default() += 1;
            counts.record(label, p.predicted);
        }
    }
    let missing: Vec<String> = truth
        .keys()
        .filter(|id| !seen.contains_key(*id))
        .map(|s| s.to_string())
        .collect();
    let duplicate: Vec<String> = seen
        .iter()
        .filter(|(_, &n)| n > 1)
        .map(|(id, _)| id.to_string())
        .collect();
    if !missing.is_empty() || !duplicate.is_empty() {
        return Err(Error::PredictionMismatch { missing, duplicate });
    }
    Ok(counts)
}

pub fn write_predictions(path: &Path, preds: &[Prediction]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for p in preds {
        serde_json::to_writer(&mut w, p)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_predictions(path: &Path) -> Result<Vec<Prediction>> {
    if !path.exists() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    let mut out = Vec::new();
    for (i, line) in BufReader::new(File::open(path)?).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| {
            Error::format(path.display().to_string(), format!("line {}: {e}", i + 1))
        })?);
    }
    Ok(out)
}

/// What `eval` writes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub split: Split,
    pub metrics: MetricsReport,
}
