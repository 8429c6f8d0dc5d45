//! Command-line front end. `run` is what the `tfdkit` binary calls.

mod config;
pub mod pipeline;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use log::{info, warn};

use crate::dataset::synth::{self, CorpusSpec, PcgParams};
use crate::dataset::{
    ingest, read_recordings, read_segments, segment_all, split, write_recordings, write_segments,
    write_wav, Manifest, ManifestHeader, Split, SplitOptions, SplitRatios,
};
use crate::error::{Error, Result};
use crate::evalstats::{
    compare_conditions, confusion, metrics, read_condition, read_predictions, EvalReport, MwMode,
};
use crate::imaging::InputKind;
use crate::refclf::TrainConfig;

pub use config::{expand_config, parse_config};
use pipeline::{export_condition, run_all, write_json, Condition, RunAllOptions, TransformOptions};

#[derive(Debug, Parser)]
#[command(
    name = "tfdkit",
    version,
    about = "Time-frequency images and evaluation for heart-sound classification",
    after_help = "Any flag can also come from `--config FILE` holding `flag = value` lines; \
                  flags on the command line take precedence."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Scan a directory of WAV files and attach labels.
    Ingest {
        #[arg(long)]
        root: PathBuf,
        /// `id,label` file; labels are 1/-1 or Normal/Abnormal.
        #[arg(long)]
        labels: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Cut recordings into non-overlapping fixed-length segments.
    Segment {
        /// Recordings manifest written by `ingest`.
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long = "len", default_value_t = 5.0)]
        seg_len: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Stratified train/validation/test split.
    Split {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, default_value = "8:1:1")]
        ratios: SplitRatios,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Keep all segments of a recording in one split.
        #[arg(long)]
        by_recording: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute time-frequency grids and export images for every segment.
    Transform(TransformArgs),
    /// Write a synthetic signal as WAV plus a JSON ground-truth sidecar.
    Synth(SynthArgs),
    /// Write a labelled synthetic phonocardiogram corpus.
    SynthCorpus(CorpusArgs),
    /// Score predictions against a split manifest.
    Eval {
        /// JSON-Lines of `{segment_id, predicted}`.
        #[arg(long)]
        predictions: PathBuf,
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, default_value = "test", value_parser = parse_split)]
        split: Split,
        /// Report path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Pairwise Mann-Whitney tests between per-seed results.
    Compare {
        #[arg(long, num_args = 1.., required = true)]
        results: Vec<PathBuf>,
        /// Exact permutation p-values (falls back above 16 pooled values).
        #[arg(long)]
        exact: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Ingest, segment, transform, split, train, evaluate and compare.
    RunAll(RunAllArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonTransform {
    /// Choi-Williams kernel width.
    #[arg(long, default_value_t = 3.0)]
    pub cwd_sigma: f64,
    /// Log-compress TFD magnitudes before imaging.
    #[arg(long)]
    pub log: bool,
    /// Square output size in pixels.
    #[arg(long, default_value_t = 224)]
    pub size: usize,
    /// Worker threads; 0 uses every logical processor.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Skip writing the binary grids.
    #[arg(long)]
    pub no_grids: bool,
}

impl CommonTransform {
    fn options(&self) -> Result<TransformOptions> {
        if self.size == 0 || !self.size.is_multiple_of(crate::refclf::POOL) {
            return Err(Error::invalid(format!(
                "--size must be a positive multiple of {}",
                crate::refclf::POOL
            )));
        }
        if !(self.cwd_sigma >= 0.0 && self.cwd_sigma.is_finite()) {
            return Err(Error::invalid("--cwd-sigma must be non-negative"));
        }
        Ok(TransformOptions {
            cwd_sigma: self.cwd_sigma,
            log: self.log,
            size: (self.size, self.size),
        })
    }
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("what").required(true).args(["tfd", "stack"])))]
pub struct TransformArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// One of stft, cwt, chirplet, wvd, spwvd, cwd, raw, lograw.
    #[arg(long, value_parser = parse_kind)]
    pub tfd: Option<InputKind>,
    /// Three comma-separated kinds stacked as channels, e.g. chirplet,cwt,stft.
    #[arg(long, value_parser = parse_stack)]
    pub stack: Option<Condition>,
    #[command(flatten)]
    pub common: CommonTransform,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SynthKind {
    Tone,
    Chirp,
    Pulse,
    Pcg,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, value_enum)]
    pub kind: SynthKind,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 2000.0)]
    pub rate: f64,
    #[arg(long, default_value_t = 5.0)]
    pub duration: f64,
    #[arg(long, default_value_t = 0.5)]
    pub amplitude: f64,
    /// Tone frequency.
    #[arg(long, default_value_t = 50.0)]
    pub freq: f64,
    #[arg(long, default_value_t = 20.0)]
    pub f_start: f64,
    #[arg(long, default_value_t = 80.0)]
    pub f_end: f64,
    /// Pulse centre in seconds.
    #[arg(long, default_value_t = 2.5)]
    pub center: f64,
    /// Pulse standard deviation in seconds.
    #[arg(long, default_value_t = 0.01)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0.0)]
    pub carrier: f64,
    #[arg(long, default_value_t = 60.0)]
    pub heart_rate: f64,
    /// Murmur band as `lo:hi` in Hz.
    #[arg(long, value_parser = parse_band)]
    pub murmur: Option<(f64, f64)>,
    #[arg(long, default_value_t = 0.25)]
    pub murmur_level: f64,
    #[arg(long, default_value_t = 0.02)]
    pub noise_level: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct CorpusArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 200)]
    pub normal: usize,
    #[arg(long, default_value_t = 200)]
    pub abnormal: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 5.0)]
    pub duration: f64,
    #[arg(long, default_value = "40:60", value_parser = parse_band)]
    pub murmur: (f64, f64),
    /// Range of murmur RMS relative to a nominal S1, as `lo:hi`.
    #[arg(long, value_parser = parse_band)]
    pub murmur_level: Option<(f64, f64)>,
    /// Range of background noise level relative to a nominal S1, as `lo:hi`.
    #[arg(long, value_parser = parse_band)]
    pub noise_level: Option<(f64, f64)>,
    /// Range of heart rates in bpm, as `lo:hi`.
    #[arg(long, value_parser = parse_band)]
    pub heart_rate: Option<(f64, f64)>,
}

#[derive(Debug, Args)]
pub struct RunAllArgs {
    #[arg(long)]
    pub root: PathBuf,
    /// Defaults to `<root>/REFERENCE.csv`.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of split seeds, counting up from --seed.
    #[arg(long, default_value_t = 10)]
    pub split_seeds: usize,
    #[arg(long, default_value = "8:1:1")]
    pub ratios: SplitRatios,
    #[arg(long)]
    pub by_recording: bool,
    /// Classifier input, repeatable: a kind or three comma-separated kinds.
    #[arg(long = "condition", value_parser = parse_stack_or_single, default_values = ["raw", "stft"])]
    pub conditions: Vec<Condition>,
    #[command(flatten)]
    pub common: CommonTransform,
    #[arg(long, default_value_t = TrainConfig::default().epochs)]
    pub epochs: usize,
    #[arg(long, default_value_t = TrainConfig::default().learning_rate)]
    pub lr: f64,
    #[arg(long, default_value_t = TrainConfig::default().batch_size)]
    pub batch_size: usize,
    #[arg(long, default_value_t = TrainConfig::default().hidden_units)]
    pub hidden: usize,
    #[arg(long)]
    pub exact: bool,
}

fn plain(e: Error) -> String {
    match e {
        Error::InvalidArgument(m) => m,
        other => other.to_string(),
    }
}

fn parse_kind(s: &str) -> std::result::Result<InputKind, String> {
    s.parse().map_err(plain)
}

fn parse_stack(s: &str) -> std::result::Result<Condition, String> {
    let c: Condition = s.parse().map_err(plain)?;
    if c.kinds().len() != 3 {
        return Err("--stack takes exactly three kinds".into());
    }
    Ok(c)
}

fn parse_stack_or_single(s: &str) -> std::result::Result<Condition, String> {
    s.parse().map_err(plain)
}

fn parse_band(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or("expected lo:hi")?;
    let lo: f64 = a
        .trim()
        .parse()
        .map_err(|_| format!("bad band edge '{a}'"))?;
    let hi: f64 = b
        .trim()
        .parse()
        .map_err(|_| format!("bad band edge '{b}'"))?;
    Ok((lo, hi))
}

fn parse_split(s: &str) -> std::result::Result<Split, String> {
    match s.to_ascii_lowercase().as_str() {
        "train" => Ok(Split::Train),
        "val" => Ok(Split::Val),
        "test" => Ok(Split::Test),
        _ => Err(format!("unknown split '{s}' (valid: train, val, test)")),
    }
}

fn with_pool<T: Send>(jobs: usize, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
    pool.install(f)
}

fn emit_json<T: serde::Serialize>(out: Option<&Path>, value: &T) -> Result<()> {
    match out {
        Some(p) => write_json(p, value),
        None => {
            println!("{}", serde_json::to_string_pretty(value)?);
            Ok(())
        }
    }
}

fn ensure_parent(path: &Path) -> Result<()> {
    if let Some(p) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(p)?;
    }
    Ok(())
}

pub fn execute(cmd: Command) -> Result<()> {
    match cmd {
        Command::Ingest { root, labels, out } => {
            let got = ingest(&root, &labels)?;
            for w in &got.warnings {
                warn!("{w}");
            }
            ensure_parent(&out)?;
            write_recordings(&out, &got.recordings, &got.warnings)?;
            info!("{} recordings", got.recordings.len());
        }
        Command::Segment {
            manifest,
            seg_len,
            out,
        } => {
            let (_, recs) = read_recordings(&manifest)?;
            let segs = segment_all(&recs, seg_len)?;
            ensure_parent(&out)?;
            write_segments(&out, &ManifestHeader::for_segments(&segs, seg_len), &segs)?;
            info!("{} segments", segs.len());
        }
        Command::Split {
            manifest,
            ratios,
            seed,
            by_recording,
            out,
        } => {
            let (_, segs) = read_segments(&manifest)?;
            let m = split(
                &segs,
                SplitOptions {
                    ratios,
                    seed,
                    by_recording,
                },
            )?;
            for w in &m.warnings {
                warn!("{w}");
            }
            ensure_parent(&out)?;
            m.write(&out)?;
        }
        Command::Transform(a) => {
            let opts = a.common.options()?;
            let cond = match (a.tfd, a.stack) {
                (Some(k), None) => Condition::single(k),
                (None, Some(c)) => c,
                _ => return Err(Error::invalid("give exactly one of --tfd or --stack")),
            };
            let (_, segs) = read_segments(&a.manifest)?;
            let save = !a.common.no_grids;
            with_pool(a.common.jobs, || {
                export_condition(&segs, &cond, &opts, &a.out, save)
            })?;
            info!("exported {} segment(s) as {}", segs.len(), cond.name());
        }
        Command::Synth(a) => synth_cmd(a)?,
        Command::SynthCorpus(a) => corpus_cmd(a)?,
        Command::Eval {
            predictions,
            manifest,
            split,
            out,
        } => {
            let m = Manifest::read(&manifest)?;
            let preds = read_predictions(&predictions)?;
            let counts = confusion(&preds, &m, split)?;
            let report = EvalReport {
                split,
                metrics: metrics(counts)?,
            };
            emit_json(out.as_deref(), &report)?;
        }
        Command::Compare {
            results,
            exact,
            out,
        } => {
            let mut by_name = BTreeMap::new();
            for p in &results {
                let r = read_condition(p)?;
                if by_name.insert(r.condition.clone(), r.macc).is_some() {
                    return Err(Error::invalid(format!(
                        "condition '{}' appears in more than one results file",
                        r.condition
                    )));
                }
            }
            let mode = if exact {
                MwMode::Exact
            } else {
                MwMode::NormalApprox
            };
            emit_json(out.as_deref(), &compare_conditions(&by_name, mode)?)?;
        }
        Command::RunAll(a) => {
            let labels = a
                .labels
                .clone()
                .unwrap_or_else(|| a.root.join("REFERENCE.csv"));
            let opts = RunAllOptions {
                seed: a.seed,
                split_seeds: a.split_seeds,
                ratios: a.ratios,
                by_recording: a.by_recording,
                conditions: a.conditions.clone(),
                transform: a.common.options()?,
                train: TrainConfig {
                    learning_rate: a.lr,
                    epochs: a.epochs,
                    batch_size: a.batch_size,
                    seed: a.seed,
                    hidden_units: a.hidden,
                },
                save_grids: !a.common.no_grids,
                exact: a.exact,
                ..RunAllOptions::new(a.root.clone(), labels, a.out.clone())
            };
            let summary = with_pool(a.common.jobs, || run_all(&opts))?;
            for c in &summary.conditions {
                info!("{}: median MAcc {:.4}", c.condition, c.macc.median);
            }
        }
    }
    Ok(())
}

fn synth_cmd(a: SynthArgs) -> Result<()> {
    let (signal, truth) = match a.kind {
        SynthKind::Tone => (
            synth::tone(a.freq, a.rate, a.duration, a.amplitude)?,
            serde_json::json!({"kind": "tone", "freq_hz": a.freq, "amplitude": a.amplitude}),
        ),
        SynthKind::Chirp => {
            let x = synth::chirp(a.f_start, a.f_end, a.rate, a.duration)?;
            let scaled = x.samples().iter().map(|v| v * a.amplitude).collect();
            (
                crate::sigcore::Signal::new(scaled, a.rate)?,
                serde_json::json!({"kind": "chirp", "f_start_hz": a.f_start, "f_end_hz": a.f_end, "amplitude": a.amplitude}),
            )
        }
        SynthKind::Pulse => {
            let x = synth::pulse(a.center, a.sigma, a.carrier, a.rate, a.duration)?;
            let scaled = x.samples().iter().map(|v| v * a.amplitude).collect();
            (
                crate::sigcore::Signal::new(scaled, a.rate)?,
                serde_json::json!({"kind": "pulse", "center_s": a.center, "sigma_s": a.sigma, "carrier_hz": a.carrier, "amplitude": a.amplitude}),
            )
        }
        SynthKind::Pcg => {
            let (x, gt) = synth::pcg(&PcgParams {
                heart_rate_bpm: a.heart_rate,
                murmur_band: a.murmur,
                murmur_level: a.murmur_level,
                noise_level: a.noise_level,
                duration_s: a.duration,
                sample_rate: a.rate,
                seed: a.seed,
            })?;
            let mut v = serde_json::to_value(&gt)?;
            v["kind"] = "pcg".into();
            (x, v)
        }
    };
    let mut truth = truth;
    truth["sample_rate"] = a.rate.into();
    truth["duration_s"] = a.duration.into();
    ensure_parent(&a.out)?;
    write_wav(&a.out, &signal)?;
    write_json(&a.out.with_extension("json"), &truth)
}

fn corpus_cmd(a: CorpusArgs) -> Result<()> {
    let d = CorpusSpec::default();
    let spec = CorpusSpec {
        normal: a.normal,
        abnormal: a.abnormal,
        seed: a.seed,
        duration_s: a.duration,
        murmur_band: a.murmur,
        murmur_level: a.murmur_level.unwrap_or(d.murmur_level),
        noise_level: a.noise_level.unwrap_or(d.noise_level),
        heart_rate_bpm: a.heart_rate.unwrap_or(d.heart_rate_bpm),
        ..d
    };
    let recs = synth::corpus(&spec)?;
    fs::create_dir_all(&a.out)?;
    let mut labels = String::new();
    let mut truth = String::new();
    for r in &recs {
        write_wav(&a.out.join(format!("{}.wav", r.id)), &r.signal)?;
        let code = if r.truth.label().is_positive() { 1 } else { -1 };
        labels.push_str(&format!("{},{}\n", r.id, code));
        let mut v = serde_json::to_value(&r.truth)?;
        v["id"] = r.id.clone().into();
        truth.push_str(&serde_json::to_string(&v)?);
        truth.push('\n');
    }
    fs::write(a.out.join("REFERENCE.csv"), labels)?;
    fs::write(a.out.join("ground_truth.jsonl"), truth)?;
    write_json(&a.out.join("corpus.json"), &spec)?;
    Ok(())
}

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

fn report(kind: &str, message: &str) {
    let one_line = message
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .collect::<Vec<_>>()
        .join(" ");
    eprintln!(
        "error kind={kind} message={}",
        serde_json::to_string(&one_line).unwrap_or_default()
    );
}

/// Parse `args` (including the program name) and run the command. Failures
/// print a single `error kind=... message="..."` line on stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args = match expand_config(args.into_iter().map(Into::into).collect()) {
        Ok(a) => a,
        Err(e) => {
            report(e.kind(), &e.to_string());
            return EXIT_USAGE;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return EXIT_OK;
            }
            let text = e.to_string();
            let msg = text
                .lines()
                .next()
                .unwrap_or("")
                .trim_start_matches("error: ");
            report("usage", msg);
            return EXIT_USAGE;
        }
    };
    match execute(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            report(e.kind(), &e.to_string());
            if matches!(e, Error::InvalidArgument(_)) {
                EXIT_USAGE
            } else {
                EXIT_FAILURE
            }
        }
    }
}
