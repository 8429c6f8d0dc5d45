use std::collections::BTreeMap;

use super::kernel::{check_len, LagKernel, MAX_SAMPLES};
use super::{CohenConfig, CohenVariant};
use crate::error::{ensure, Result};
use crate::sigcore::{fft_in_place, next_pow2, Complex64, Signal, WindowSpec};
use crate::tfd::{meta_from, TfdGrid, TfdKind};

/// A window centred on index zero; even lengths gain one sample.
struct Centred {
    half: usize,
    weights: Vec<f64>,
}

impl Centred {
    fn new(spec: &WindowSpec, signal_len: usize, what: &str) -> Result<Self> {
        ensure!(spec.length >= 1, "{what} window length must be at least 1");
        ensure!(
            spec.length < signal_len,
            "{what} window of {} samples is not shorter than the signal ({signal_len})",
            spec.length
        );
        let length = spec.length | 1;
        let sized = WindowSpec {
            length,
            sigma: Some(spec.effective_sigma()),
            ..*spec
        };
        let weights = match spec.kind {
            crate::sigcore::WindowKind::Hann => crate::sigcore::hann_window(length)?,
            crate::sigcore::WindowKind::Gaussian => sized.build()?,
        };
        Ok(Self {
            half: length / 2,
            weights,
        })
    }

    fn at(&self, m: isize) -> f64 {
        if m.unsigned_abs() > self.half {
            0.0
        } else {
            self.weights[(self.half as isize + m) as usize]
        }
    }
}

/// Fourier transform over lag of every row, optionally lag-windowed.
/// Returns the real parts of the first `nfft/2 + 1` bins scaled by `1/fs`,
/// and the largest imaginary residue seen.
fn lag_transform(
    kernel: &LagKernel,
    nfft: usize,
    fs: f64,
    lag_window: Option<&Centred>,
) -> (Vec<f64>, f64) {
    let n = kernel.len();
    let cols = nfft / 2 + 1;
    let mut values = Vec::with_capacity(n * cols);
    let mut residue: f64 = 0.0;
    let mut buf = vec![Complex64::new(0.0, 0.0); nfft];
    for t in 0..n {
        buf.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        let mut reach = kernel.max_lag(t) as isize;
        if let Some(w) = lag_window {
            reach = reach.min(w.half as isize);
        }
        for m in -reach..=reach {
            let weight = lag_window.map_or(1.0, |w| w.at(m));
            buf[m.rem_euclid(nfft as isize) as usize] += kernel.at(t, m) * weight;
        }
        fft_in_place(&mut buf, false);
        for v in &buf {
            residue = residue.max(v.im.abs() / fs);
        }
        values.extend(buf[..cols].iter().map(|v| v.re / fs));
    }
    (values, residue)
}

/// Linear convolution of every column with `g` (centred, unit sum), same size.
fn smooth_columns(values: &mut [f64], rows: usize, cols: usize, g: &Centred) {
    if g.half == 0 {
        return;
    }
    let total: f64 = g.weights.iter().sum();
    let len = next_pow2(rows + g.weights.len());
    let mut kernel = vec![Complex64::new(0.0, 0.0); len];
    for (i, w) in g.weights.iter().enumerate() {
        kernel[i] = Complex64::new(w / total, 0.0);
    }
    fft_in_place(&mut kernel, false);
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    let scale = 1.0 / len as f64;
    for c in 0..cols {
        buf.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        for r in 0..rows {
            buf[r] = Complex64::new(values[r * cols + c], 0.0);
        }
        fft_in_place(&mut buf, false);
        for (b, k) in buf.iter_mut().zip(&kernel) {
            *b *= k;
        }
        fft_in_place(&mut buf, true);
        for r in 0..rows {
            values[r * cols + c] = buf[r + g.half].re * scale;
        }
    }
}

fn assemble(
    kind: TfdKind,
    x: &Signal,
    nfft: usize,
    values: Vec<f64>,
    mut meta: BTreeMap<String, String>,
) -> Result<TfdGrid> {
    let fs = x.sample_rate();
    let time_axis = (0..x.len()).map(|t| t as f64 / fs).collect();
    let freq_axis = (0..=nfft / 2)
        .map(|k| k as f64 * fs / nfft as f64)
        .collect();
    meta.insert("freq_bins".into(), nfft.to_string());
    meta.insert("sample_rate".into(), fs.to_string());
    meta.insert("lag_grid".into(), "half-sample (2x interpolated)".into());
    TfdGrid::new(kind, time_axis, freq_axis, values, meta)
}

pub(crate) fn wvd_with_residue(x: &Signal, cfg: &CohenConfig) -> Result<(TfdGrid, f64)> {
    cfg.validate()?;
    check_len(x, MAX_SAMPLES)?;
    let kernel = LagKernel::new(x, cfg.use_analytic)?;
    let (values, residue) = lag_transform(&kernel, cfg.freq_bins, x.sample_rate(), None);
    let meta = meta_from([("analytic", cfg.use_analytic)]);
    Ok((
        assemble(TfdKind::Wvd, x, cfg.freq_bins, values, meta)?,
        residue,
    ))
}

/// Wigner-Ville distribution; one row per input sample.
pub fn wvd(x: &Signal, cfg: &CohenConfig) -> Result<TfdGrid> {
    wvd_with_residue(x, cfg).map(|(g, _)| g)
}

/// Wigner-Ville with a lag window only (no time smoothing).
pub fn pseudo_wvd(x: &Signal, lag_window: &WindowSpec, cfg: &CohenConfig) -> Result<TfdGrid> {
    cfg.validate()?;
    check_len(x, MAX_SAMPLES)?;
    let h = Centred::new(lag_window, x.len(), "lag")?;
    let kernel = LagKernel::new(x, cfg.use_analytic)?;
    let (values, _) = lag_transform(&kernel, cfg.freq_bins, x.sample_rate(), Some(&h));
    let meta = meta_from([
        ("analytic", cfg.use_analytic.to_string()),
        (
            "lag_window",
            format!("{:?}/{}", lag_window.kind, h.weights.len()),
        ),
    ]);
    assemble(TfdKind::Wvd, x, cfg.freq_bins, values, meta)
}

/// Smoothed pseudo Wigner-Ville: lag window before the lag transform, then
/// each frequency column convolved with the (unit-sum) time window.
pub fn spwvd(x: &Signal, cfg: &CohenConfig) -> Result<TfdGrid> {
    cfg.validate()?;
    check_len(x, MAX_SAMPLES)?;
    let n = x.len();
    let lag_spec = cfg.lag_window(n);
    let time_spec = cfg.time_window(n);
    let h = Centred::new(&lag_spec, n, "frequency smoothing")?;
    let g = Centred::new(&time_spec, n, "time smoothing")?;
    let kernel = LagKernel::new(x, cfg.use_analytic)?;
    let (mut values, _) = lag_transform(&kernel, cfg.freq_bins, x.sample_rate(), Some(&h));
    smooth_columns(&mut values, n, cfg.freq_bins / 2 + 1, &g);
    let meta = meta_from([
        ("analytic", cfg.use_analytic.to_string()),
        (
            "lag_window",
            format!("{:?}/{}", lag_spec.kind, h.weights.len()).to_lowercase(),
        ),
        (
            "time_window",
            format!("{:?}/{}", time_spec.kind, g.weights.len()).to_lowercase(),
        ),
        ("time_window_sigma", time_spec.effective_sigma().to_string()),
    ]);
    assemble(TfdKind::Spwvd, x, cfg.freq_bins, values, meta)
}

/// Choi-Williams distribution through the ambiguity plane.
///
/// For every lag the time sequence `K[., m]` is taken to the doppler domain,
/// multiplied by `exp(-sigma (eta m)^2)` and brought back. Lags then fold onto
/// the frequency grid as in [`wvd`]. The doppler transform is zero-padded to
/// a power of two of at least three signal lengths.
pub fn cwd(x: &Signal, cfg: &CohenConfig) -> Result<TfdGrid> {
    cfg.validate()?;
    check_len(x, MAX_SAMPLES)?;
    let kernel = LagKernel::new(x, cfg.use_analytic)?;
    let n = kernel.len();
    let nfft = cfg.freq_bins;
    let doppler_len = next_pow2(3 * n);
    let sigma = cfg.cwd_sigma;
    let etas: Vec<f64> = (0..doppler_len)
        .map(|k| {
            let s = if k <= doppler_len / 2 {
                k as isize
            } else {
                k as isize - doppler_len as isize
            };
            s as f64 / doppler_len as f64
        })
        .collect();

    let mut folded = vec![Complex64::new(0.0, 0.0); n * nfft];
    let mut column = vec![Complex64::new(0.0, 0.0); doppler_len];
    let inv = 1.0 / doppler_len as f64;
    for m in 0..n as isize {
        column
            .iter_mut()
            .for_each(|v| *v = Complex64::new(0.0, 0.0));
        let mut any = false;
        for (t, slot) in column.iter_mut().enumerate().take(n) {
            *slot = kernel.at(t, m);
            any |= slot.norm_sqr() > 0.0;
        }
        if !any {
            continue;
        }
        fft_in_place(&mut column, false);
        let mm = (m * m) as f64;
        for (v, eta) in column.iter_mut().zip(&etas) {
            *v *= (-sigma * eta * eta * mm).exp() * inv;
        }
        fft_in_place(&mut column, true);
        let pos = m.rem_euclid(nfft as isize) as usize;
        let neg = (-m).rem_euclid(nfft as isize) as usize;
        for t in 0..n {
            let v = column[t];
            folded[t * nfft + pos] += v;
            if m != 0 {
                folded[t * nfft + neg] += v.conj();
            }
        }
    }

    let fs = x.sample_rate();
    let cols = nfft / 2 + 1;
    let mut values = Vec::with_capacity(n * cols);
    for row in folded.chunks_mut(nfft) {
        fft_in_place(row, false);
        values.extend(row[..cols].iter().map(|v| v.re / fs));
    }
    let meta = meta_from([
        ("analytic", cfg.use_analytic.to_string()),
        ("cwd_sigma", sigma.to_string()),
        ("doppler_length", doppler_len.to_string()),
    ]);
    assemble(TfdKind::Cwd, x, nfft, values, meta)
}

/// Dispatch on `cfg.variant`.
pub fn cohen(x: &Signal, cfg: &CohenConfig) -> Result<TfdGrid> {
    match cfg.variant {
        CohenVariant::Wvd => wvd(x, cfg),
        CohenVariant::Spwvd => spwvd(x, cfg),
        CohenVariant::Cwd => cwd(x, cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn tone(f: f64, fs: f64, n: usize) -> Signal {
        Signal::new(
            (0..n)
                .map(|k| (2.0 * PI * f * k as f64 / fs).cos())
                .collect(),
            fs,
        )
        .unwrap()
    }

    #[test]
    fn wvd_is_real() {
        let x = Signal::new(
            (0..200)
                .map(|k| ((k * k) as f64 * 0.002).sin() + 0.2 * (k as f64 * 0.9).cos())
                .collect(),
            500.0,
        )
        .unwrap();
        let (g, residue) = wvd_with_residue(&x, &CohenConfig::default()).unwrap();
        assert!(residue < 1e-9 * g.max_abs(), "residue {residue}");
    }

    #[test]
    fn zero_signal() {
        let z = Signal::zeros(64, 100.0).unwrap();
        for variant in [CohenVariant::Wvd, CohenVariant::Spwvd, CohenVariant::Cwd] {
            let g = cohen(&z, &CohenConfig::with_variant(variant)).unwrap();
            assert!(g.values().iter().all(|v| *v == 0.0), "{variant:?}");
            assert_eq!(g.rows(), 64);
            assert_eq!(g.cols(), 257);
        }
    }

    #[test]
    fn guards() {
        let x = tone(10.0, 100.0, 64);
        assert!(wvd(&Signal::zeros(3, 1.0).unwrap(), &CohenConfig::default()).is_err());
        let neg = CohenConfig {
            cwd_sigma: -1.0,
            ..CohenConfig::default()
        };
        assert!(cwd(&x, &neg).is_err());
        let long = CohenConfig {
            time_smoothing: Some(WindowSpec::gaussian(64)),
            ..CohenConfig::default()
        };
        assert!(spwvd(&x, &long).is_err());
        let odd_bins = CohenConfig {
            freq_bins: 511,
            ..CohenConfig::default()
        };
        assert!(wvd(&x, &odd_bins).is_err());
    }

    #[test]
    fn tone_ridge() {
        let fs = 1000.0;
        let x = tone(125.0, fs, 256);
        let g = wvd(&x, &CohenConfig::default()).unwrap();
        for r in 32..224 {
            assert!((g.freq_axis()[g.row_argmax(r)] - 125.0).abs() <= fs / 512.0);
        }
    }

    #[test]
    fn degenerate_smoothing_is_pseudo_wvd() {
        let x = Signal::new(
            (0..128)
                .map(|k| (k as f64 * 0.37).sin() * (k as f64 * 0.05).cos())
                .collect(),
            100.0,
        )
        .unwrap();
        let cfg = CohenConfig {
            time_smoothing: Some(WindowSpec::gaussian(1)),
            freq_smoothing: Some(WindowSpec::hann(1)),
            ..CohenConfig::default()
        };
        let a = spwvd(&x, &cfg).unwrap();
        let b = pseudo_wvd(&x, &WindowSpec::hann(1), &cfg).unwrap();
        for (u, v) in a.values().iter().zip(b.values()) {
            assert!((u - v).abs() < 1e-9);
        }
        // a unit lag window keeps only lag zero: flat rows at |z|^2 / fs
        let k = LagKernel::new(&x, true).unwrap();
        for r in [0usize, 50, 127] {
            for v in a.row(r) {
                assert!((v - k.power(r) / 100.0).abs() < 1e-12);
            }
        }
    }
}
