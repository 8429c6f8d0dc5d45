//! JSON-Lines manifests: one header object, then one record per line.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::{Label, Manifest, RecordingMeta, SegmentRecord, SplitRatios};
use crate::error::{Error, Result};

use crate::TOOL_VERSION;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ManifestKind {
    Recordings,
    Segments,
    Split,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestHeader {
    pub kind: ManifestKind,
    pub tool_version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratios: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub by_recording: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub segment_seconds: Option<f64>,
    /// `counts[label][split]`; unsplit manifests use the single key `All`.
    pub counts: BTreeMap<String, BTreeMap<String, usize>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

fn totals<'a>(
    labels: impl Iterator<Item = &'a Label>,
) -> BTreeMap<String, BTreeMap<String, usize>> {
    let mut out: BTreeMap<String, BTreeMap<String, usize>> = Label::ALL
        .iter()
        .map(|l| {
            (
                l.name().to_string(),
                BTreeMap::from([("All".to_string(), 0)]),
            )
        })
        .collect();
    for l in labels {
        *out.get_mut(l.name()).unwrap().get_mut("All").unwrap() += 1;
    }
    out
}

impl ManifestHeader {
    fn bare(kind: ManifestKind, counts: BTreeMap<String, BTreeMap<String, usize>>) -> Self {
        ManifestHeader {
            kind,
            tool_version: TOOL_VERSION.to_string(),
            seed: None,
            ratios: None,
            by_recording: None,
            segment_seconds: None,
            counts,
            warnings: Vec::new(),
        }
    }

    pub fn for_recordings(recs: &[RecordingMeta], warnings: &[String]) -> Self {
        let mut h = Self::bare(
            ManifestKind::Recordings,
            totals(recs.iter().map(|r| &r.label)),
        );
        h.warnings = warnings.to_vec();
        h
    }

    pub fn for_segments(segs: &[SegmentRecord], segment_seconds: f64) -> Self {
        let mut h = Self::bare(
            ManifestKind::Segments,
            totals(segs.iter().map(|s| &s.label)),
        );
        h.segment_seconds = Some(segment_seconds);
        h
    }

    pub fn for_split(m: &Manifest) -> Self {
        let mut h = Self::bare(ManifestKind::Split, m.counts());
        h.seed = Some(m.seed);
        h.ratios = Some(m.ratios.to_string());
        h.by_recording = Some(m.by_recording);
        h.segment_seconds = m.segments.first().map(|s| s.length_s);
        h.warnings = m.warnings.clone();
        h
    }
}

fn write_jsonl<T: Serialize>(path: &Path, header: &ManifestHeader, rows: &[T]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer(&mut w, header)?;
    w.write_all(b"\n")?;
    for r in rows {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<(ManifestHeader, Vec<T>)> {
    if !path.exists() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    let ctx = || path.display().to_string();
    let mut lines = BufReader::new(File::open(path)?).lines();
    let first = lines
        .next()
        .ok_or_else(|| Error::format(ctx(), "empty manifest"))??;
    let header: ManifestHeader =
        serde_json::from_str(&first).map_err(|e| Error::format(ctx(), format!("header: {e}")))?;
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        rows.push(
            serde_json::from_str(&line)
                .map_err(|e| Error::format(ctx(), format!("line {}: {e}", i + 2)))?,
        );
    }
    Ok((header, rows))
}

pub fn write_recordings(path: &Path, recs: &[RecordingMeta], warnings: &[String]) -> Result<()> {
    write_jsonl(path, &ManifestHeader::for_recordings(recs, warnings), recs)
}

pub fn read_recordings(path: &Path) -> Result<(ManifestHeader, Vec<RecordingMeta>)> {
    let (h, rows) = read_jsonl(path)?;
    if h.kind != ManifestKind::Recordings {
        return Err(Error::format(
            path.display().to_string(),
            format!("expected a recordings manifest, found {:?}", h.kind),
        ));
    }
    Ok((h, rows))
}

pub fn write_segments(path: &Path, header: &ManifestHeader, segs: &[SegmentRecord]) -> Result<()> {
    write_jsonl(path, header, segs)
}

/// Reads either an unsplit segment manifest or a split manifest.
pub fn read_segments(path: &Path) -> Result<(ManifestHeader, Vec<SegmentRecord>)> {
    let (h, rows) = read_jsonl(path)?;
    if h.kind == ManifestKind::Recordings {
        return Err(Error::format(
            path.display().to_string(),
            "expected a segment manifest, found a recordings manifest",
        ));
    }
    Ok((h, rows))
}

impl Manifest {
    pub fn write(&self, path: &Path) -> Result<()> {
        write_segments(path, &ManifestHeader::for_split(self), &self.segments)
    }

    pub fn read(path: &Path) -> Result<Manifest> {
        let (h, segments) = read_segments(path)?;
        let ctx = || path.display().to_string();
        if h.kind != ManifestKind::Split || segments.iter().any(|s| s.split.is_none()) {
            return Err(Error::format(ctx(), "manifest has not been split"));
        }
        let ratios: SplitRatios = h
            .ratios
            .as_deref()
            .ok_or_else(|| Error::format(ctx(), "split header lacks ratios"))?
            .parse()?;
        Ok(Manifest {
            segments,
            seed: h.seed.unwrap_or(0),
            ratios,
            by_recording: h.by_recording.unwrap_or(false),
            warnings: h.warnings,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{segment_all, split, SplitOptions};

    #[test]
    fn split_manifest_round_trip_is_byte_identical() {
        let recs: Vec<RecordingMeta> = (0..30)
            .map(|i| RecordingMeta {
                id: format!("a{i:04}"),
                path: format!("/data/a{i:04}.wav").into(),
                label: if i % 4 == 0 {
                    Label::Abnormal
                } else {
                    Label::Normal
                },
                duration_s: 11.0 + i as f64 * 0.37,
                sample_rate: 2000.0,
            })
            .collect();
        let segs = segment_all(&recs, 5.0).unwrap();
        let m = split(
            &segs,
            SplitOptions {
                seed: 3,
                ..Default::default()
            },
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.jsonl");
        m.write(&p).unwrap();
        let back = Manifest::read(&p).unwrap();
        assert_eq!(back, m);
        let p2 = dir.path().join("m2.jsonl");
        back.write(&p2).unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), std::fs::read(&p2).unwrap());

        let rp = dir.path().join("r.jsonl");
        write_recordings(&rp, &recs, &[]).unwrap();
        let (h, r) = read_recordings(&rp).unwrap();
        assert_eq!(r, recs);
        assert_eq!(h.counts["Abnormal"]["All"], 8);
        assert!(Manifest::read(&rp).is_err());
    }
}
