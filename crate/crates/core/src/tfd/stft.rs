use serde::{Deserialize, Serialize};

use super::{meta_from, TfdGrid, TfdKind};
use crate::error::{ensure, Result};
use crate::sigcore::{fft_in_place, hann_window, Complex64, Signal};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StftConfig {
    pub window_ms: f64,
    pub overlap_ms: f64,
    pub fft_length: usize,
}

impl Default for StftConfig {
    fn default() -> Self {
        Self {
            window_ms: 128.0,
            overlap_ms: 125.0,
            fft_length: 512,
        }
    }
}

impl StftConfig {
    /// `(window_samples, hop_samples)` at `sample_rate`.
    pub fn frame_geometry(&self, sample_rate: f64) -> Result<(usize, usize)> {
        ensure!(
            self.overlap_ms > 0.0 && self.overlap_ms < self.window_ms,
            "need 0 < overlap_ms < window_ms, got {} / {}",
            self.overlap_ms,
            self.window_ms
        );
        let window = (self.window_ms * sample_rate / 1000.0).round() as usize;
        let overlap = (self.overlap_ms * sample_rate / 1000.0).round() as usize;
        ensure!(window >= 1, "window shorter than one sample");
        ensure!(
            overlap < window,
            "overlap rounds to the full window at {sample_rate} Hz"
        );
        ensure!(
            self.fft_length >= window,
            "fft length {} shorter than window {window}",
            self.fft_length
        );
        Ok((window, window - overlap))
    }
}

/// Hann-windowed short-time Fourier magnitude.
///
/// Frame `f` starts at sample `f * hop`; frames that would overrun the end of
/// the signal are dropped. Columns cover `0..=fft_length/2`.
pub fn stft(x: &Signal, cfg: &StftConfig) -> Result<TfdGrid> {
    let fs = x.sample_rate();
    let (win_len, hop) = cfg.frame_geometry(fs)?;
    x.require_len(win_len, "stft")?;
    let window = hann_window(win_len)?;
    let nfft = cfg.fft_length;
    let frames = (x.len() - win_len) / hop + 1;
    let cols = nfft / 2 + 1;

    let mut values = Vec::with_capacity(frames * cols);
    let mut buf = vec![Complex64::new(0.0, 0.0); nfft];
    let samples = x.samples();
    for f in 0..frames {
        let start = f * hop;
        buf.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        for (k, w) in window.iter().enumerate() {
            buf[k] = Complex64::new(w * samples[start + k], 0.0);
        }
        fft_in_place(&mut buf, false);
        values.extend(buf[..cols].iter().map(|v| v.norm()));
    }
    let time_axis = (0..frames).map(|f| (f * hop) as f64 / fs).collect();
    let freq_axis = (0..cols).map(|m| m as f64 * fs / nfft as f64).collect();
    let meta = meta_from([
        ("window", "hann".to_string()),
        ("window_samples", win_len.to_string()),
        ("hop_samples", hop.to_string()),
        ("fft_length", nfft.to_string()),
        ("zero_padding", (nfft - win_len).to_string()),
        ("sample_rate", fs.to_string()),
    ]);
    TfdGrid::new(TfdKind::Stft, time_axis, freq_axis, values, meta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn default_geometry_at_2khz() {
        let (w, h) = StftConfig::default().frame_geometry(2000.0).unwrap();
        assert_eq!((w, h), (256, 6));
    }

    #[test]
    fn rejects_bad_config() {
        let bad = StftConfig {
            window_ms: 10.0,
            overlap_ms: 10.0,
            fft_length: 512,
        };
        assert!(bad.frame_geometry(2000.0).is_err());
        let short_fft = StftConfig {
            fft_length: 128,
            ..StftConfig::default()
        };
        assert!(short_fft.frame_geometry(2000.0).is_err());
        let x = Signal::zeros(100, 2000.0).unwrap();
        assert!(stft(&x, &StftConfig::default()).is_err());
    }

    #[test]
    fn zero_signal_zero_grid() {
        let g = stft(
            &Signal::zeros(2000, 2000.0).unwrap(),
            &StftConfig::default(),
        )
        .unwrap();
        assert_eq!(g.cols(), 257);
        assert!(g.values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn frame_times_and_count() {
        let x = Signal::zeros(10_000, 2000.0).unwrap();
        let g = stft(&x, &StftConfig::default()).unwrap();
        assert_eq!(g.rows(), 1625);
        assert!((g.time_axis()[1] - 0.003).abs() < 1e-12);
        assert!((g.freq_axis()[256] - 1000.0).abs() < 1e-9);
    }

    #[test]
    fn frames_match_naive_dft() {
        let fs = 2000.0;
        let x: Vec<f64> = (0..600)
            .map(|k| ((k as f64) * 0.21).sin() * (k as f64 * 0.003).cos())
            .collect();
        let sig = Signal::new(x.clone(), fs).unwrap();
        let g = stft(&sig, &StftConfig::default()).unwrap();
        let w = hann_window(256).unwrap();
        for f in [0usize, 7, g.rows() - 1] {
            for m in [0usize, 13, 100, 256] {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..256 {
                    let ang = -2.0 * PI * (m * k) as f64 / 512.0;
                    acc += w[k] * x[f * 6 + k] * Complex64::new(ang.cos(), ang.sin());
                }
                assert!((acc.norm() - g.get(f, m)).abs() < 1e-9);
            }
        }
    }
}
