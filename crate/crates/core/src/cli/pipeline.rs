//! Segment-level rendering and the end-to-end study driven by `run-all`.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cohen::{cohen, CohenConfig, CohenVariant};
use crate::dataset::{
    ingest, load_segment, segment_all, split, write_recordings, write_segments, Label,
    ManifestHeader, SegmentRecord, Split, SplitOptions, SplitRatios, TrainingRecipe,
    SEGMENT_SECONDS,
};
use crate::error::{ensure, Error, Result};
use crate::evalstats::{
    compare_conditions, confusion, metrics, write_condition, write_predictions, ComparisonTable,
    ConditionResult, EvalReport, MwMode, Prediction, SeedAggregate,
};
use crate::imaging::{
    encode_grid, encode_tensor, grid_to_image, image_file_name, normalize, render_waveform,
    replicate3, stack3, write_png, ExportedImage, InputKind, DEFAULT_SIZE,
};
use crate::refclf::{pool_features, predict, train, Example, TrainConfig};
use crate::sigcore::Signal;
use crate::tfd::{chirplet, cwt, stft, ChirpletConfig, CwtConfig, StftConfig, TfdGrid};

/// One classifier input: a single representation or a stack of three.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Condition(Vec<InputKind>);

impl Condition {
    pub fn new(kinds: Vec<InputKind>) -> Result<Self> {
        ensure!(
            kinds.len() == 1 || kinds.len() == 3,
            "a condition is one representation or a stack of three, got {}",
            kinds.len()
        );
        Ok(Condition(kinds))
    }

    pub fn single(kind: InputKind) -> Self {
        Condition(vec![kind])
    }

    pub fn kinds(&self) -> &[InputKind] {
        &self.0
    }

    pub fn name(&self) -> String {
        self.0
            .iter()
            .map(|k| k.name())
            .collect::<Vec<_>>()
            .join("-")
    }
}

impl FromStr for Condition {
    type Err = Error;

    /// `stft` or `chirplet,cwt,stft`.
    fn from_str(s: &str) -> Result<Self> {
        let kinds = s
            .split(',')
            .map(str::parse::<InputKind>)
            .collect::<Result<Vec<_>>>()?;
        Condition::new(kinds)
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformOptions {
    pub cwd_sigma: f64,
    /// Log-compress TFD magnitudes before imaging.
    pub log: bool,
    pub size: (usize, usize),
}

impl Default for TransformOptions {
    fn default() -> Self {
        TransformOptions {
            cwd_sigma: 3.0,
            log: false,
            size: DEFAULT_SIZE,
        }
    }
}

/// Compute the grid of a TFD kind with default parameters.
pub fn compute_grid(
    x: &Signal,
    kind: InputKind,
    opts: &TransformOptions,
) -> Result<Option<TfdGrid>> {
    let cohen_cfg = |variant| CohenConfig {
        cwd_sigma: opts.cwd_sigma,
        ..CohenConfig::with_variant(variant)
    };
    Ok(Some(match kind {
        InputKind::Stft => stft(x, &StftConfig::default())?,
        InputKind::Cwt => cwt(x, &CwtConfig::default())?,
        InputKind::Chirplet => chirplet(x, &ChirpletConfig::default())?,
        InputKind::Wvd => cohen(x, &cohen_cfg(CohenVariant::Wvd))?,
        InputKind::Spwvd => cohen(x, &cohen_cfg(CohenVariant::Spwvd))?,
        InputKind::Cwd => cohen(x, &cohen_cfg(CohenVariant::Cwd))?,
        InputKind::Raw | InputKind::Lograw => return Ok(None),
    }))
}

/// Single-channel raster of one representation, plus the grid it came from.
pub fn render_kind(
    x: &Signal,
    kind: InputKind,
    opts: &TransformOptions,
) -> Result<(ExportedImage, Option<TfdGrid>)> {
    match compute_grid(x, kind, opts)? {
        Some(g) => Ok((grid_to_image(&g, opts.log, opts.size)?, Some(g))),
        None => Ok((
            render_waveform(x, kind == InputKind::Lograw, opts.size)?,
            None,
        )),
    }
}

/// Everything produced for one segment under one condition.
#[derive(Debug, Clone)]
pub struct Rendered {
    /// 8-bit raster with one channel per representation.
    pub raster: ExportedImage,
    /// Normalized 3-channel network input.
    pub tensor: ExportedImage,
    pub grids: Vec<TfdGrid>,
}

pub fn render_condition(
    x: &Signal,
    segment_id: &str,
    cond: &Condition,
    opts: &TransformOptions,
) -> Result<Rendered> {
    let mut rasters = Vec::new();
    let mut grids = Vec::new();
    for &k in cond.kinds() {
        let (img, grid) = render_kind(x, k, opts)?;
        rasters.push(img.with_segment(segment_id));
        grids.extend(grid);
    }
    let (raster, three) = match rasters.as_slice() {
        [one] => (one.clone(), replicate3(one)?),
        [a, b, c] => {
            let s = stack3(a, b, c)?;
            (s.clone(), s)
        }
        _ => unreachable!("conditions hold one or three kinds"),
    };
    let tensor = normalize(&three)?;
    Ok(Rendered {
        raster,
        tensor,
        grids,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexEntry {
    pub segment_id: String,
    pub label: Label,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split: Option<Split>,
    pub image: PathBuf,
    pub tensor: PathBuf,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub grids: Vec<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexHeader {
    pub kind: String,
    pub tool_version: String,
    pub condition: String,
    pub options: TransformOptions,
    pub count: usize,
}

/// Write images, tensors and (optionally) grids for every segment under
/// `out`, then the index. Returns the pooled classifier features per segment
/// in manifest order.
pub fn export_condition(
    segments: &[SegmentRecord],
    cond: &Condition,
    opts: &TransformOptions,
    out: &Path,
    save_grids: bool,
) -> Result<Vec<Vec<f64>>> {
    for sub in ["images", "tensors", "grids"] {
        if sub != "grids" || save_grids {
            fs::create_dir_all(out.join(sub))?;
        }
    }
    let results: Vec<Result<(IndexEntry, Vec<f64>)>> = segments
        .par_iter()
        .map(|seg| {
            let x = load_segment(seg)?;
            let r = render_condition(&x, &seg.segment_id, cond, opts)?;
            let name = image_file_name(r.raster.provenance());
            let image = Path::new("images").join(&name);
            write_png(&r.raster, &out.join(&image))?;
            let tensor = Path::new("tensors").join(name.replace(".png", ".tfdt"));
            fs::write(out.join(&tensor), encode_tensor(&r.tensor))?;
            let mut grids = Vec::new();
            if save_grids {
                for g in &r.grids {
                    let p = Path::new("grids").join(format!(
                        "{}__{}.tfdg",
                        seg.segment_id,
                        g.kind().name()
                    ));
                    fs::write(out.join(&p), encode_grid(g))?;
                    grids.push(p);
                }
            }
            let features = pool_features(&r.tensor)?;
            Ok((
                IndexEntry {
                    segment_id: seg.segment_id.clone(),
                    label: seg.label,
                    split: seg.split,
                    image,
                    tensor,
                    grids,
                },
                features,
            ))
        })
        .collect();

    let mut entries = Vec::with_capacity(results.len());
    let mut features = Vec::with_capacity(results.len());
    for (seg, r) in segments.iter().zip(results) {
        let (e, f) = r.map_err(|e| match e {
            Error::ZeroVariance(_) => Error::ZeroVariance(format!(
                "segment {} renders to a constant image",
                seg.segment_id
            )),
            other => other,
        })?;
        entries.push(e);
        features.push(f);
    }

    let header = IndexHeader {
        kind: "transform".into(),
        tool_version: crate::TOOL_VERSION.into(),
        condition: cond.name(),
        options: *opts,
        count: entries.len(),
    };
    let mut w = std::io::BufWriter::new(fs::File::create(out.join("index.jsonl"))?);
    serde_json::to_writer(&mut w, &header)?;
    w.write_all(b"\n")?;
    for e in &entries {
        serde_json::to_writer(&mut w, e)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    write_json(
        &out.join("training_recipe.json"),
        &TrainingRecipe::default(),
    )?;
    Ok(features)
}

pub(crate) fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

#[derive(Debug, Clone)]
pub struct RunAllOptions {
    pub root: PathBuf,
    pub labels: PathBuf,
    pub out: PathBuf,
    pub seed: u64,
    pub split_seeds: usize,
    pub ratios: SplitRatios,
    pub by_recording: bool,
    pub conditions: Vec<Condition>,
    pub transform: TransformOptions,
    pub train: TrainConfig,
    pub save_grids: bool,
    pub exact: bool,
}

impl RunAllOptions {
    pub fn new(root: PathBuf, labels: PathBuf, out: PathBuf) -> Self {
        RunAllOptions {
            root,
            labels,
            out,
            seed: 0,
            split_seeds: 10,
            ratios: SplitRatios::default(),
            by_recording: false,
            conditions: vec![
                Condition::single(InputKind::Raw),
                Condition::single(InputKind::Stft),
            ],
            transform: TransformOptions::default(),
            train: TrainConfig::default(),
            save_grids: true,
            exact: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionSummary {
    pub condition: String,
    pub macc: SeedAggregate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub tool_version: String,
    pub seed: u64,
    pub split_seeds: Vec<u64>,
    pub recordings: BTreeMap<String, usize>,
    pub segments: BTreeMap<String, usize>,
    pub conditions: Vec<ConditionSummary>,
    pub comparison: Option<ComparisonTable>,
    pub warnings: Vec<String>,
}

impl RunSummary {
    pub fn median(&self, condition: &str) -> Option<f64> {
        self.conditions
            .iter()
            .find(|c| c.condition == condition)
            .map(|c| c.macc.median)
    }
}

fn label_counts<'a>(labels: impl Iterator<Item = &'a Label>) -> BTreeMap<String, usize> {
    let mut m: BTreeMap<String, usize> = Label::ALL
        .iter()
        .map(|l| (l.name().to_string(), 0))
        .collect();
    for l in labels {
        *m.get_mut(l.name()).unwrap() += 1;
    }
    m
}

/// Train on the train split and predict the test split.
fn evaluate_split(
    segments: &[SegmentRecord],
    features: &[Vec<f64>],
    cfg: &TrainConfig,
) -> Result<(Vec<Prediction>, Vec<Example>)> {
    let train_set: Vec<Example> = segments
        .iter()
        .zip(features)
        .filter(|(s, _)| s.split == Some(Split::Train))
        .map(|(s, f)| Example {
            features: f.clone(),
            label: s.label,
        })
        .collect();
    let params = train(&train_set, cfg)?;
    let (ids, test): (Vec<&str>, Vec<Vec<f64>>) = segments
        .iter()
        .zip(features)
        .filter(|(s, _)| s.split == Some(Split::Test))
        .map(|(s, f)| (s.segment_id.as_str(), f.clone()))
        .unzip();
    let labels = predict(&params, &test)?;
    Ok((
        ids.into_iter()
            .zip(labels)
            .map(|(id, predicted)| Prediction {
                segment_id: id.to_string(),
                predicted,
            })
            .collect(),
        train_set,
    ))
}

/// Ingest, segment, transform every condition, then for each split seed
/// train and score the reference classifier; finally compare conditions.
pub fn run_all(opts: &RunAllOptions) -> Result<RunSummary> {
    ensure!(!opts.conditions.is_empty(), "no conditions to run");
    ensure!(opts.split_seeds > 0, "at least one split seed is needed");
    let out = &opts.out;
    fs::create_dir_all(out.join("splits"))?;

    let ingested = ingest(&opts.root, &opts.labels)?;
    for w in &ingested.warnings {
        warn!("{w}");
    }
    ensure!(
        !ingested.recordings.is_empty(),
        "no labelled recordings under {}",
        opts.root.display()
    );
    write_recordings(
        &out.join("recordings.jsonl"),
        &ingested.recordings,
        &ingested.warnings,
    )?;

    let segments = segment_all(&ingested.recordings, SEGMENT_SECONDS)?;
    write_segments(
        &out.join("segments.jsonl"),
        &ManifestHeader::for_segments(&segments, SEGMENT_SECONDS),
        &segments,
    )?;
    write_json(
        &out.join("training_recipe.json"),
        &TrainingRecipe::default(),
    )?;
    info!(
        "{} recordings, {} segments",
        ingested.recordings.len(),
        segments.len()
    );

    let mut features = BTreeMap::new();
    for cond in &opts.conditions {
        info!("transforming {}", cond.name());
        let f = export_condition(
            &segments,
            cond,
            &opts.transform,
            &out.join(cond.name()),
            opts.save_grids,
        )?;
        features.insert(cond.name(), f);
    }

    let seeds: Vec<u64> = (0..opts.split_seeds as u64)
        .map(|i| opts.seed + i)
        .collect();
    let mut manifests = Vec::new();
    let mut warnings = ingested.warnings.clone();
    for &s in &seeds {
        let m = split(
            &segments,
            SplitOptions {
                ratios: opts.ratios,
                seed: s,
                by_recording: opts.by_recording,
            },
        )?;
        m.write(&out.join("splits").join(format!("split_seed{s}.jsonl")))?;
        warnings.extend(m.warnings.iter().cloned());
        manifests.push(m);
    }

    let jobs: Vec<(usize, usize)> = (0..opts.conditions.len())
        .flat_map(|c| (0..seeds.len()).map(move |s| (c, s)))
        .collect();
    let scored: Vec<Result<(Vec<Prediction>, EvalReport)>> = jobs
        .par_iter()
        .map(|&(c, s)| {
            let name = opts.conditions[c].name();
            let m = &manifests[s];
            let cfg = TrainConfig {
                seed: seeds[s],
                ..opts.train
            };
            let (preds, _) = evaluate_split(&m.segments, &features[&name], &cfg)?;
            let counts = confusion(&preds, m, Split::Test)?;
            Ok((
                preds,
                EvalReport {
                    split: Split::Test,
                    metrics: metrics(counts)?,
                },
            ))
        })
        .collect();

    let mut per_condition: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for (&(c, s), r) in jobs.iter().zip(scored) {
        let (preds, report) = r?;
        let name = opts.conditions[c].name();
        let dir = out.join(&name);
        write_predictions(
            &dir.join(format!("predictions_seed{}.jsonl", seeds[s])),
            &preds,
        )?;
        write_json(&dir.join(format!("metrics_seed{}.json", seeds[s])), &report)?;
        per_condition
            .entry(name)
            .or_default()
            .push(report.metrics.macc);
    }

    let mut aggregates = BTreeMap::new();
    let mut conditions = Vec::new();
    for cond in &opts.conditions {
        let name = cond.name();
        let agg = SeedAggregate::from_values(per_condition.remove(&name).unwrap_or_default())?;
        write_condition(
            &out.join(&name).join("result.json"),
            &ConditionResult {
                condition: name.clone(),
                macc: agg.clone(),
            },
        )?;
        conditions.push(ConditionSummary {
            condition: name.clone(),
            macc: agg.clone(),
        });
        aggregates.insert(name, agg);
    }

    let comparison = if seeds.len() >= 2 {
        let mode = if opts.exact {
            MwMode::Exact
        } else {
            MwMode::NormalApprox
        };
        let t = compare_conditions(&aggregates, mode)?;
        write_json(&out.join("comparison.json"), &t)?;
        Some(t)
    } else {
        None
    };

    let summary = RunSummary {
        tool_version: crate::TOOL_VERSION.into(),
        seed: opts.seed,
        split_seeds: seeds,
        recordings: label_counts(ingested.recordings.iter().map(|r| &r.label)),
        segments: label_counts(segments.iter().map(|s| &s.label)),
        conditions,
        comparison,
        warnings,
    };
    write_json(&out.join("summary.json"), &summary)?;
    Ok(summary)
}
