use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::{Label, RecordingMeta};
use crate::error::{Error, Result};

/// Result of scanning a corpus directory.
#[derive(Debug, Clone, Default)]
pub struct Ingested {
    pub recordings: Vec<RecordingMeta>,
    pub warnings: Vec<String>,
}

impl Ingested {
    pub fn count(&self, label: Label) -> usize {
        self.recordings.iter().filter(|r| r.label == label).count()
    }
}

/// Parse an `id,label` file. A leading header row is tolerated.
pub fn read_labels(path: &Path) -> Result<BTreeMap<String, Label>> {
    if !path.exists() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| Error::format(path.display().to_string(), e.to_string()))?;
    let mut labels = BTreeMap::new();
    for (i, row) in reader.records().enumerate() {
        let row = row.map_err(|e| Error::format(path.display().to_string(), e.to_string()))?;
        if row.iter().all(str::is_empty) {
            continue;
        }
        let (id, label) = match (row.get(0), row.get(1)) {
            (Some(id), Some(label)) if !id.is_empty() => (id, label),
            _ => {
                return Err(Error::format(
                    path.display().to_string(),
                    format!("line {}: expected 'id,label'", i + 1),
                ))
            }
        };
        match label.parse::<Label>() {
            Ok(l) => {
                labels.insert(id.to_string(), l);
            }
            Err(_) if i == 0 => continue,
            Err(e) => {
                return Err(Error::format(
                    path.display().to_string(),
                    format!("line {}: {e}", i + 1),
                ))
            }
        }
    }
    Ok(labels)
}

fn collect_wavs(dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    let mut entries: Vec<_> = std::fs::read_dir(dir)?.collect::<std::io::Result<_>>()?;
    entries.sort_by_key(|e| e.file_name());
    for e in entries {
        let path = e.path();
        if e.file_type()?.is_dir() {
            collect_wavs(&path, out)?;
        } else if path
            .extension()
            .is_some_and(|x| x.eq_ignore_ascii_case("wav"))
        {
            out.push(path);
        }
    }
    Ok(())
}

fn probe(path: &Path) -> std::result::Result<(f64, f64), String> {
    let reader = hound::WavReader::open(path).map_err(|e| e.to_string())?;
    let spec = reader.spec();
    if spec.channels != 1
        || spec.bits_per_sample != 16
        || spec.sample_format != hound::SampleFormat::Int
    {
        return Err(format!(
            "expected mono 16-bit PCM, found {} channel(s) at {} bits",
            spec.channels, spec.bits_per_sample
        ));
    }
    let rate = spec.sample_rate as f64;
    let duration = reader.duration() as f64 / rate;
    if duration <= 0.0 {
        return Err("empty recording".into());
    }
    Ok((duration, rate))
}

/// Scan `root` recursively for `.wav` files and attach labels by file stem.
///
/// Unlabeled, unreadable or duplicate files are skipped with a warning.
/// Recordings come back sorted by id.
pub fn ingest(root: &Path, labels_file: &Path) -> Result<Ingested> {
    let labels = read_labels(labels_file)?;
    if !root.is_dir() {
        return Err(Error::MissingFile(root.to_path_buf()));
    }
    let mut files = Vec::new();
    collect_wavs(root, &mut files)?;

    let probed: Vec<_> = files.par_iter().map(|p| (p, probe(p))).collect();

    let mut out = Ingested::default();
    let mut seen = BTreeSet::new();
    for (path, info) in probed {
        let id = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let Some(&label) = labels.get(&id) else {
            out.warnings
                .push(format!("no label for {}; skipped", path.display()));
            continue;
        };
        if !seen.insert(id.clone()) {
            out.warnings.push(format!(
                "duplicate recording id {id} at {}; skipped",
                path.display()
            ));
            continue;
        }
        match info {
            Ok((duration_s, sample_rate)) => out.recordings.push(RecordingMeta {
                id,
                path: path.clone(),
                label,
                duration_s,
                sample_rate,
            }),
            Err(e) => out
                .warnings
                .push(format!("unreadable {}: {e}; skipped", path.display())),
        }
    }
    out.recordings.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(out)
}
