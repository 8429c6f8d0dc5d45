use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{meta_from, TfdGrid, TfdKind};
use crate::error::{ensure, Result};
use crate::sigcore::{analytic, fft_in_place, Complex64, Signal, WindowSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChirpletConfig {
    /// Chirp rate in Hz per second.
    pub chirp_rate: f64,
    pub window: WindowSpec,
    /// Number of frequency bins between 0 and the Nyquist rate.
    pub freq_points: usize,
    pub hop: usize,
}

impl Default for ChirpletConfig {
    fn default() -> Self {
        Self {
            chirp_rate: 0.0,
            window: WindowSpec::gaussian(64),
            freq_points: 512,
            hop: 1,
        }
    }
}

/// Single-rate chirplet transform magnitude.
///
/// For each analysis centre `t0` the analytic signal is multiplied by the
/// frequency-rotation operator `exp(-j a t^2 / 2)` and the shift operator
/// `exp(j a t0 t)`, windowed around `t0` and Fourier transformed. Combined, the
/// two operators equal `exp(-j a (t - t0)^2 / 2)` up to a unit-modulus constant
/// per frame, which is the form evaluated here.
///
/// The transform length is `2 * freq_points` and the first `freq_points` bins
/// are kept, so columns span `[0, fs/2)`.
pub fn chirplet(x: &Signal, cfg: &ChirpletConfig) -> Result<TfdGrid> {
    let win = cfg.window.build()?;
    let win_len = win.len();
    x.require_len(win_len.max(2), "chirplet")?;
    ensure!(cfg.freq_points >= 2, "freq_points must be at least 2");
    ensure!(cfg.hop >= 1, "hop must be at least one sample");
    ensure!(cfg.chirp_rate.is_finite(), "chirp rate must be finite");
    let nfft = 2 * cfg.freq_points;
    ensure!(
        win_len <= nfft,
        "window of {win_len} samples exceeds transform length {nfft}"
    );

    let fs = x.sample_rate();
    let z = analytic(x)?;
    let alpha = 2.0 * PI * cfg.chirp_rate;
    let centre = (win_len - 1) as f64 / 2.0;
    // operator and window are identical for every frame
    let kernel: Vec<Complex64> = win
        .iter()
        .enumerate()
        .map(|(k, &w)| {
            let d = (k as f64 - centre) / fs;
            Complex64::from_polar(w, -0.5 * alpha * d * d)
        })
        .collect();

    let frames = (x.len() - win_len) / cfg.hop + 1;
    let cols = cfg.freq_points;
    let mut values = Vec::with_capacity(frames * cols);
    let mut buf = vec![Complex64::new(0.0, 0.0); nfft];
    for f in 0..frames {
        let start = f * cfg.hop;
        buf.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        for (k, op) in kernel.iter().enumerate() {
            buf[k] = z[start + k] * op;
        }
        fft_in_place(&mut buf, false);
        values.extend(buf[..cols].iter().map(|v| v.norm()));
    }

    let time_axis = (0..frames)
        .map(|f| (f * cfg.hop) as f64 / fs + centre / fs)
        .collect();
    let freq_axis = (0..cols).map(|m| m as f64 * fs / nfft as f64).collect();
    let meta = meta_from([
        ("chirp_rate_hz_per_s", cfg.chirp_rate.to_string()),
        ("window", format!("{:?}", cfg.window.kind).to_lowercase()),
        ("window_samples", win_len.to_string()),
        ("window_sigma", cfg.window.effective_sigma().to_string()),
        ("freq_points", cols.to_string()),
        ("fft_length", nfft.to_string()),
        ("hop_samples", cfg.hop.to_string()),
        ("sample_rate", fs.to_string()),
    ]);
    TfdGrid::new(TfdKind::Chirplet, time_axis, freq_axis, values, meta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_signal_zero_grid() {
        let g = chirplet(
            &Signal::zeros(200, 2000.0).unwrap(),
            &ChirpletConfig::default(),
        )
        .unwrap();
        assert_eq!(g.rows(), 137);
        assert_eq!(g.cols(), 512);
        assert!(g.values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn window_longer_than_signal() {
        assert!(chirplet(
            &Signal::zeros(32, 2000.0).unwrap(),
            &ChirpletConfig::default()
        )
        .is_err());
    }

    #[test]
    fn tone_ridge_at_tone_frequency() {
        let fs = 2000.0;
        let x: Vec<f64> = (0..1000)
            .map(|k| (2.0 * PI * 250.0 * k as f64 / fs).cos())
            .collect();
        let g = chirplet(
            &Signal::new(x, fs).unwrap(),
            &ChirpletConfig {
                hop: 16,
                ..Default::default()
            },
        )
        .unwrap();
        for r in 2..g.rows() - 2 {
            let f = g.freq_axis()[g.row_argmax(r)];
            assert!((f - 250.0).abs() <= fs / 1024.0);
        }
    }
}
