//! Parametric test signals and a simple phonocardiogram generator.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::Label;
use crate::error::{ensure, Result};
use crate::sigcore::{dft_real, idft, Signal};

fn sample_count(sample_rate: f64, duration_s: f64) -> Result<usize> {
    ensure!(
        sample_rate.is_finite() && sample_rate > 0.0,
        "sample rate must be positive, got {sample_rate}"
    );
    ensure!(
        duration_s.is_finite() && duration_s > 0.0,
        "duration must be positive, got {duration_s}"
    );
    Ok((duration_s * sample_rate).round() as usize)
}

fn below_nyquist(f: f64, sample_rate: f64, what: &str) -> Result<()> {
    ensure!(
        f.is_finite() && f >= 0.0 && f < sample_rate / 2.0,
        "{what} {f} Hz must lie in [0, {}) Hz",
        sample_rate / 2.0
    );
    Ok(())
}

/// `amplitude · cos(2π f t)`.
pub fn tone(freq_hz: f64, sample_rate: f64, duration_s: f64, amplitude: f64) -> Result<Signal> {
    below_nyquist(freq_hz, sample_rate, "tone frequency")?;
    let n = sample_count(sample_rate, duration_s)?;
    let w = 2.0 * PI * freq_hz / sample_rate;
    Signal::new(
        (0..n).map(|i| amplitude * (w * i as f64).cos()).collect(),
        sample_rate,
    )
}

/// Linear chirp `cos(2π (f0 t + (f1 − f0) t² / 2T))` with unit amplitude.
pub fn chirp(f_start: f64, f_end: f64, sample_rate: f64, duration_s: f64) -> Result<Signal> {
    below_nyquist(f_start, sample_rate, "chirp start frequency")?;
    below_nyquist(f_end, sample_rate, "chirp end frequency")?;
    let n = sample_count(sample_rate, duration_s)?;
    let k = (f_end - f_start) / duration_s;
    Signal::new(
        (0..n)
            .map(|i| {
                let t = i as f64 / sample_rate;
                (2.0 * PI * (f_start * t + 0.5 * k * t * t)).cos()
            })
            .collect(),
        sample_rate,
    )
}

/// Instantaneous frequency of [`chirp`] at time `t`.
pub fn chirp_frequency(f_start: f64, f_end: f64, duration_s: f64, t: f64) -> f64 {
    f_start + (f_end - f_start) * t / duration_s
}

/// Gaussian envelope centred at `center_s`, optionally modulating a cosine
/// carrier (`carrier_hz = 0` gives a bare Gaussian).
pub fn pulse(
    center_s: f64,
    sigma_s: f64,
    carrier_hz: f64,
    sample_rate: f64,
    duration_s: f64,
) -> Result<Signal> {
    below_nyquist(carrier_hz, sample_rate, "pulse carrier")?;
    ensure!(
        sigma_s.is_finite() && sigma_s > 0.0,
        "pulse width must be positive"
    );
    ensure!(center_s.is_finite(), "pulse centre must be finite");
    let n = sample_count(sample_rate, duration_s)?;
    Signal::new(
        (0..n)
            .map(|i| {
                let d = i as f64 / sample_rate - center_s;
                (-0.5 * (d / sigma_s).powi(2)).exp() * (2.0 * PI * carrier_hz * d).cos()
            })
            .collect(),
        sample_rate,
    )
}

/// Amplitude of a nominal S1 burst. Small enough that heavy background noise
/// still fits in 16-bit full scale.
pub const PCG_AMPLITUDE: f64 = 0.12;
pub const S1_SECONDS: f64 = 0.12;
pub const S2_SECONDS: f64 = 0.10;
const FIRST_ONSET_S: f64 = 0.05;
const GATE_TAPER_S: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcgParams {
    pub heart_rate_bpm: f64,
    /// Pass band of the systolic murmur, if any.
    pub murmur_band: Option<(f64, f64)>,
    /// Murmur RMS relative to a nominal S1 amplitude.
    pub murmur_level: f64,
    /// Background noise standard deviation relative to a nominal S1 amplitude.
    pub noise_level: f64,
    pub duration_s: f64,
    pub sample_rate: f64,
    pub seed: u64,
}

impl Default for PcgParams {
    fn default() -> Self {
        PcgParams {
            heart_rate_bpm: 60.0,
            murmur_band: None,
            murmur_level: 0.25,
            noise_level: 0.02,
            duration_s: 5.0,
            sample_rate: 2000.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SoundKind {
    S1,
    S2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SoundEvent {
    pub kind: SoundKind,
    pub onset_s: f64,
    pub duration_s: f64,
    pub freq_hz: f64,
    pub amplitude: f64,
}

/// Everything needed to check a synthetic recording against its analysis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub params: PcgParams,
    pub events: Vec<SoundEvent>,
    /// Systolic intervals `(start, end)` in seconds, S1 end to S2 onset.
    pub systole: Vec<(f64, f64)>,
}

impl GroundTruth {
    pub fn label(&self) -> Label {
        if self.params.murmur_band.is_some() {
            Label::Abnormal
        } else {
            Label::Normal
        }
    }

    pub fn onsets(&self, kind: SoundKind) -> Vec<f64> {
        self.events
            .iter()
            .filter(|e| e.kind == kind)
            .map(|e| e.onset_s)
            .collect()
    }
}

fn add_burst(x: &mut [f64], fs: f64, ev: &SoundEvent, phase: f64) {
    let start = (ev.onset_s * fs).round() as usize;
    let len = (ev.duration_s * fs).round() as usize;
    let w = 2.0 * PI * ev.freq_hz / fs;
    for i in 0..len.min(x.len().saturating_sub(start)) {
        let env = 0.5 - 0.5 * (2.0 * PI * i as f64 / (len - 1) as f64).cos();
        x[start + i] += ev.amplitude * env * (w * i as f64 + phase).sin();
    }
}

fn band_noise(n: usize, fs: f64, band: (f64, f64), rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    let white: Vec<f64> = (0..n)
        .map(|_| Normal::new(0.0, 1.0).unwrap().sample(rng))
        .collect();
    let mut spec = dft_real(&white)?;
    for (k, c) in spec.iter_mut().enumerate() {
        let f = k.min(n - k) as f64 * fs / n as f64;
        if f < band.0 || f > band.1 {
            *c = 0.0.into();
        }
    }
    let y: Vec<f64> = idft(&spec)?.iter().map(|c| c.re).collect();
    let rms = (y.iter().map(|v| v * v).sum::<f64>() / n as f64).sqrt();
    ensure!(
        rms > 0.0,
        "murmur band {:?} Hz contains no frequency bins",
        band
    );
    Ok(y.into_iter().map(|v| v / rms).collect())
}

/// Raised-cosine gate over each systolic interval.
fn systole_gate(n: usize, fs: f64, systole: &[(f64, f64)]) -> Vec<f64> {
    let mut g = vec![0.0; n];
    for &(a, b) in systole {
        let (i0, i1) = (
            (a * fs).round() as usize,
            ((b * fs).round() as usize).min(n),
        );
        let taper = ((GATE_TAPER_S * fs).round() as usize).max(1);
        for (i, gi) in g.iter_mut().enumerate().take(i1).skip(i0) {
            let edge = (i - i0).min(i1 - 1 - i);
            *gi = if edge >= taper {
                1.0
            } else {
                0.5 - 0.5 * (PI * edge as f64 / taper as f64).cos()
            };
        }
    }
    g
}

/// Synthetic phonocardiogram: S1 and S2 bursts at the cardiac period, white
/// background noise and an optional band-limited systolic murmur.
///
/// Event parameters, noise and murmur come from separate random streams of
/// the same seed, so toggling the murmur leaves everything else untouched.
pub fn pcg(p: &PcgParams) -> Result<(Signal, GroundTruth)> {
    ensure!(
        (30.0..=200.0).contains(&p.heart_rate_bpm),
        "heart rate must lie in [30, 200] bpm, got {}",
        p.heart_rate_bpm
    );
    ensure!(
        p.murmur_level >= 0.0 && p.noise_level >= 0.0,
        "noise and murmur levels must be non-negative"
    );
    let fs = p.sample_rate;
    let n = sample_count(fs, p.duration_s)?;
    if let Some((lo, hi)) = p.murmur_band {
        ensure!(
            lo >= 0.0 && lo < hi,
            "murmur band ({lo}, {hi}) is not an interval"
        );
        below_nyquist(hi, fs, "murmur band edge")?;
    }
    let period = 60.0 / p.heart_rate_bpm;

    let mut event_rng = ChaCha8Rng::seed_from_u64(p.seed);
    event_rng.set_stream(0);
    let mut x = vec![0.0; n];
    let mut events = Vec::new();
    let mut systole = Vec::new();
    let mut k = 0;
    loop {
        let s1 = FIRST_ONSET_S + k as f64 * period;
        if s1 + S1_SECONDS > p.duration_s {
            break;
        }
        let ev1 = SoundEvent {
            kind: SoundKind::S1,
            onset_s: s1,
            duration_s: S1_SECONDS,
            freq_hz: event_rng.random_range(30.0..60.0),
            amplitude: PCG_AMPLITUDE * event_rng.random_range(0.8..1.2),
        };
        add_burst(&mut x, fs, &ev1, event_rng.random_range(0.0..2.0 * PI));
        events.push(ev1);

        let s2 = s1 + S1_SECONDS + 0.25 * period;
        let (f2, a2, ph2) = (
            event_rng.random_range(45.0..65.0),
            PCG_AMPLITUDE * event_rng.random_range(0.6..1.0),
            event_rng.random_range(0.0..2.0 * PI),
        );
        if s2 + S2_SECONDS <= p.duration_s {
            let ev2 = SoundEvent {
                kind: SoundKind::S2,
                onset_s: s2,
                duration_s: S2_SECONDS,
                freq_hz: f2,
                amplitude: a2,
            };
            add_burst(&mut x, fs, &ev2, ph2);
            events.push(ev2);
            systole.push((s1 + S1_SECONDS, s2));
        }
        k += 1;
    }

    if p.noise_level > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
        rng.set_stream(1);
        let dist = Normal::new(0.0, p.noise_level * PCG_AMPLITUDE).unwrap();
        for v in &mut x {
            *v += dist.sample(&mut rng);
        }
    }

    if let Some(band) = p.murmur_band {
        let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
        rng.set_stream(2);
        let noise = band_noise(n, fs, band, &mut rng)?;
        let gate = systole_gate(n, fs, &systole);
        let scale = p.murmur_level * PCG_AMPLITUDE;
        for ((v, m), g) in x.iter_mut().zip(noise).zip(gate) {
            *v += scale * g * m;
        }
    }

    Ok((
        Signal::new(x, fs)?,
        GroundTruth {
            params: p.clone(),
            events,
            systole,
        },
    ))
}

/// Recipe for a labelled synthetic corpus; abnormal recordings carry a murmur.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub normal: usize,
    pub abnormal: usize,
    pub seed: u64,
    pub duration_s: f64,
    pub sample_rate: f64,
    pub heart_rate_bpm: (f64, f64),
    pub murmur_band: (f64, f64),
    pub murmur_level: (f64, f64),
    pub noise_level: (f64, f64),
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec {
            normal: 200,
            abnormal: 200,
            seed: 0,
            duration_s: 5.0,
            sample_rate: 2000.0,
            heart_rate_bpm: (55.0, 95.0),
            murmur_band: (40.0, 60.0),
            // Broadband noise strong enough to bury the murmur in the
            // waveform, while the murmur still dominates its own band.
            murmur_level: (0.5, 0.7),
            noise_level: (0.4, 1.0),
        }
    }
}

/// One generated recording of a corpus.
#[derive(Debug, Clone)]
pub struct SynthRecording {
    pub id: String,
    pub signal: Signal,
    pub truth: GroundTruth,
}

fn draw(rng: &mut ChaCha8Rng, range: (f64, f64)) -> f64 {
    if range.1 > range.0 {
        rng.random_range(range.0..range.1)
    } else {
        range.0
    }
}

/// Generate the corpus in id order (`syn00000`, ...). Normal recordings come
/// first, then abnormal ones.
pub fn corpus(spec: &CorpusSpec) -> Result<Vec<SynthRecording>> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let total = spec.normal + spec.abnormal;
    (0..total)
        .map(|i| {
            let abnormal = i >= spec.normal;
            let params = PcgParams {
                heart_rate_bpm: draw(&mut rng, spec.heart_rate_bpm),
                murmur_band: abnormal.then_some(spec.murmur_band),
                murmur_level: draw(&mut rng, spec.murmur_level),
                noise_level: draw(&mut rng, spec.noise_level),
                duration_s: spec.duration_s,
                sample_rate: spec.sample_rate,
                seed: rng.random(),
            };
            let (signal, truth) = pcg(&params)?;
            Ok(SynthRecording {
                id: format!("syn{i:05}"),
                signal,
                truth,
            })
        })
        .collect()
}
