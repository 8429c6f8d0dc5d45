//! Recording ingestion, fixed-length segmentation, stratified splitting,
//! manifest persistence and synthetic signal generation.

mod audio;
mod ingest;
mod manifest;
mod recipe;
mod split;
pub mod synth;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};

pub use audio::{load_segment, read_wav, write_wav};
pub use ingest::{ingest, read_labels, Ingested};
pub use manifest::{
    read_recordings, read_segments, write_recordings, write_segments, ManifestHeader, ManifestKind,
};
pub use recipe::TrainingRecipe;
pub use split::{split, Manifest, SplitOptions, SplitRatios};

/// Working sample rate every segment is brought to before analysis.
pub const WORKING_RATE: f64 = 2000.0;
pub const SEGMENT_SECONDS: f64 = 5.0;

/// Class label. Abnormal recordings are the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Label {
    Normal,
    Abnormal,
}

impl Label {
    pub const ALL: [Label; 2] = [Label::Normal, Label::Abnormal];

    pub fn name(self) -> &'static str {
        match self {
            Label::Normal => "Normal",
            Label::Abnormal => "Abnormal",
        }
    }

    pub fn is_positive(self) -> bool {
        self == Label::Abnormal
    }

    /// Class index used by the reference classifier.
    pub fn index(self) -> usize {
        match self {
            Label::Normal => 0,
            Label::Abnormal => 1,
        }
    }

    pub fn from_index(i: usize) -> Label {
        if i == 0 {
            Label::Normal
        } else {
            Label::Abnormal
        }
    }
}

impl FromStr for Label {
    type Err = Error;

    /// Accepts `1`/`-1` (abnormal/normal) or the class names in any case.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "1" | "+1" | "abnormal" => Ok(Label::Abnormal),
            "-1" | "normal" => Ok(Label::Normal),
            other => Err(Error::invalid(format!("unrecognized label '{other}'"))),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Split {
    Train,
    Val,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Val, Split::Test];

    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "Train",
            Split::Val => "Val",
            Split::Test => "Test",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordingMeta {
    pub id: String,
    pub path: PathBuf,
    pub label: Label,
    pub duration_s: f64,
    pub sample_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentRecord {
    pub segment_id: String,
    pub recording_id: String,
    pub path: PathBuf,
    pub sample_rate: f64,
    pub start_s: f64,
    pub length_s: f64,
    pub label: Label,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split: Option<Split>,
}

/// Cut a recording into consecutive non-overlapping windows starting at 0.
/// The tail shorter than `seg_len_s` is dropped.
pub fn segment(rec: &RecordingMeta, seg_len_s: f64) -> Result<Vec<SegmentRecord>> {
    ensure!(
        seg_len_s.is_finite() && seg_len_s > 0.0,
        "segment length must be positive, got {seg_len_s}"
    );
    // A file whose length is an exact multiple of the segment length should
    // not lose its last window to rounding in frames / rate.
    let count = (rec.duration_s / seg_len_s + 1e-9).floor().max(0.0) as usize;
    Ok((0..count)
        .map(|i| SegmentRecord {
            segment_id: format!("{}_s{:03}", rec.id, i),
            recording_id: rec.id.clone(),
            path: rec.path.clone(),
            sample_rate: rec.sample_rate,
            start_s: i as f64 * seg_len_s,
            length_s: seg_len_s,
            label: rec.label,
            split: None,
        })
        .collect())
}

pub fn segment_all(recs: &[RecordingMeta], seg_len_s: f64) -> Result<Vec<SegmentRecord>> {
    let mut out = Vec::new();
    for r in recs {
        out.extend(segment(r, seg_len_s)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(duration_s: f64) -> RecordingMeta {
        RecordingMeta {
            id: "r".into(),
            path: "r.wav".into(),
            label: Label::Normal,
            duration_s,
            sample_rate: 2000.0,
        }
    }

    #[test]
    fn segmentation_counts() {
        let s = segment(&rec(12.0), 5.0).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].start_s, 0.0);
        assert_eq!(s[1].start_s, 5.0);
        assert_eq!(s[1].segment_id, "r_s001");
        assert!(segment(&rec(4.9), 5.0).unwrap().is_empty());
        assert_eq!(segment(&rec(10.0), 5.0).unwrap().len(), 2);
        assert!(segment(&rec(10.0), 0.0).is_err());
    }

    #[test]
    fn labels_parse() {
        assert_eq!("1".parse::<Label>().unwrap(), Label::Abnormal);
        assert_eq!("-1".parse::<Label>().unwrap(), Label::Normal);
        assert_eq!("normal".parse::<Label>().unwrap(), Label::Normal);
        assert!("0".parse::<Label>().is_err());
    }
}
