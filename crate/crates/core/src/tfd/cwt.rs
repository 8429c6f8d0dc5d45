use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{meta_from, TfdGrid, TfdKind};
use crate::error::{ensure, Error, Result};
use crate::sigcore::{fft_in_place, next_pow2, Complex64, Signal};

/// Centre frequency of the Morlet mother wavelet in cycles per unit scale.
pub const MORLET_CENTER: f64 = 0.8125;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaleSpec {
    /// Scales in samples.
    Explicit(Vec<f64>),
    /// Scales whose pseudo-frequencies are log-spaced from `f_min_hz` upward.
    LogFrequency {
        f_min_hz: f64,
        f_max_hz: f64,
        voices_per_octave: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CwtConfig {
    pub center_frequency: f64,
    pub scales: ScaleSpec,
    /// Shift step between output rows, in samples.
    pub shift: usize,
}

impl Default for CwtConfig {
    fn default() -> Self {
        Self {
            center_frequency: MORLET_CENTER,
            scales: ScaleSpec::LogFrequency {
                f_min_hz: 5.0,
                f_max_hz: 500.0,
                voices_per_octave: 12,
            },
            shift: 1,
        }
    }
}

impl CwtConfig {
    /// Scales sorted in descending order (ascending pseudo-frequency).
    pub fn resolve_scales(&self, sample_rate: f64) -> Result<Vec<f64>> {
        ensure!(
            self.center_frequency > 0.0,
            "centre frequency must be positive"
        );
        let mut scales = match &self.scales {
            ScaleSpec::Explicit(s) => s.clone(),
            ScaleSpec::LogFrequency {
                f_min_hz,
                f_max_hz,
                voices_per_octave,
            } => {
                ensure!(
                    *f_min_hz > 0.0 && f_max_hz >= f_min_hz && *voices_per_octave > 0,
                    "bad log-frequency scale range {f_min_hz}..{f_max_hz} / {voices_per_octave}"
                );
                let octaves = (f_max_hz / f_min_hz).log2();
                let steps = (octaves * *voices_per_octave as f64 + 1e-9).floor() as u32;
                (0..=steps)
                    .map(|k| {
                        let f = f_min_hz * 2f64.powf(k as f64 / *voices_per_octave as f64);
                        self.center_frequency * sample_rate / f
                    })
                    .collect()
            }
        };
        ensure!(!scales.is_empty(), "scale list is empty");
        ensure!(
            scales.iter().all(|s| s.is_finite() && *s > 0.0),
            "all scales must be positive"
        );
        scales.sort_by(|a, b| b.total_cmp(a));
        scales.dedup();
        Ok(scales)
    }
}

/// Pseudo-frequency in Hz of scale `alpha` (in samples).
pub fn pseudo_frequency(alpha: f64, sample_rate: f64, center_frequency: f64) -> Result<f64> {
    for (name, v) in [
        ("scale", alpha),
        ("sample rate", sample_rate),
        ("centre frequency", center_frequency),
    ] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::invalid(format!("{name} must be positive, got {v}")));
        }
    }
    Ok(center_frequency * sample_rate / alpha)
}

/// Fourier transform of the Morlet mother wavelet
/// `pi^-1/4 exp(j w0 t) exp(-t^2/2)`, evaluated at angular frequency `omega`.
pub fn morlet_spectrum(omega: f64, center_frequency: f64) -> f64 {
    let w0 = 2.0 * PI * center_frequency;
    PI.powf(-0.25) * (2.0 * PI).sqrt() * (-0.5 * (omega - w0).powi(2)).exp()
}

/// Morlet scalogram, computed in the frequency domain.
///
/// Each column is `|IDFT(X(w) * sqrt(a) * Psi(a w))|` for one scale `a`; the
/// signal is zero-padded to a power of two long enough to hold five scale
/// widths on either side so that circular wrap stays negligible.
pub fn cwt(x: &Signal, cfg: &CwtConfig) -> Result<TfdGrid> {
    x.require_len(2, "cwt")?;
    ensure!(cfg.shift >= 1, "shift step must be at least one sample");
    let fs = x.sample_rate();
    let scales = cfg.resolve_scales(fs)?;
    let n = x.len();
    let widest = scales[0];
    let padded = next_pow2(n + 2 * (5.0 * widest).ceil() as usize);

    let mut spectrum = vec![Complex64::new(0.0, 0.0); padded];
    for (dst, &v) in spectrum.iter_mut().zip(x.samples()) {
        *dst = Complex64::new(v, 0.0);
    }
    fft_in_place(&mut spectrum, false);

    let rows: Vec<usize> = (0..n).step_by(cfg.shift).collect();
    let cols = scales.len();
    let mut values = vec![0.0; rows.len() * cols];
    let mut buf = vec![Complex64::new(0.0, 0.0); padded];
    let inv = 1.0 / padded as f64;
    for (c, &alpha) in scales.iter().enumerate() {
        let gain = alpha.sqrt();
        for (m, dst) in buf.iter_mut().enumerate() {
            let signed = if m <= padded / 2 {
                m as f64
            } else {
                m as f64 - padded as f64
            };
            let omega = 2.0 * PI * signed / padded as f64;
            *dst = spectrum[m] * (gain * morlet_spectrum(alpha * omega, cfg.center_frequency));
        }
        fft_in_place(&mut buf, true);
        for (r, &t) in rows.iter().enumerate() {
            values[r * cols + c] = buf[t].norm() * inv;
        }
    }

    let time_axis = rows.iter().map(|&t| t as f64 / fs).collect();
    let freq_axis = scales
        .iter()
        .map(|&a| pseudo_frequency(a, fs, cfg.center_frequency))
        .collect::<Result<Vec<_>>>()?;
    let meta = meta_from([
        ("wavelet", "morlet".to_string()),
        ("center_frequency", cfg.center_frequency.to_string()),
        ("shift", cfg.shift.to_string()),
        ("scales", scales.len().to_string()),
        ("scale_max", widest.to_string()),
        ("scale_min", scales[cols - 1].to_string()),
        ("padded_length", padded.to_string()),
        ("sample_rate", fs.to_string()),
    ]);
    TfdGrid::new(TfdKind::Cwt, time_axis, freq_axis, values, meta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pseudo_frequency_cases() {
        assert!((pseudo_frequency(0.8125 * 2000.0, 2000.0, 0.8125).unwrap() - 1.0).abs() < 1e-12);
        assert!((pseudo_frequency(32.5, 2000.0, 0.8125).unwrap() - 50.0).abs() < 1e-12);
        let f = pseudo_frequency(10.0, 2000.0, 0.8125).unwrap();
        assert_eq!(pseudo_frequency(20.0, 2000.0, 0.8125).unwrap(), f / 2.0);
        assert!(pseudo_frequency(0.0, 2000.0, 0.8125).is_err());
        assert!(pseudo_frequency(1.0, -1.0, 0.8125).is_err());
        assert!(pseudo_frequency(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn default_scales_cover_5_to_500_hz() {
        let s = CwtConfig::default().resolve_scales(2000.0).unwrap();
        assert_eq!(s.len(), 80);
        assert!((s[0] - 325.0).abs() < 1e-9);
        assert!(s.windows(2).all(|w| w[0] > w[1]));
        let top = pseudo_frequency(*s.last().unwrap(), 2000.0, MORLET_CENTER).unwrap();
        assert!(top <= 500.0 && top > 470.0);
    }

    #[test]
    fn empty_scales_rejected() {
        let cfg = CwtConfig {
            scales: ScaleSpec::Explicit(vec![]),
            ..CwtConfig::default()
        };
        let x = Signal::zeros(64, 2000.0).unwrap();
        assert!(cwt(&x, &cfg).is_err());
        let neg = CwtConfig {
            scales: ScaleSpec::Explicit(vec![4.0, -1.0]),
            ..CwtConfig::default()
        };
        assert!(cwt(&x, &neg).is_err());
    }

    #[test]
    fn zero_signal_zero_grid() {
        let cfg = CwtConfig {
            scales: ScaleSpec::Explicit(vec![4.0, 8.0, 16.0]),
            ..CwtConfig::default()
        };
        let g = cwt(&Signal::zeros(256, 2000.0).unwrap(), &cfg).unwrap();
        assert_eq!((g.rows(), g.cols()), (256, 3));
        assert!(g.values().iter().all(|v| *v == 0.0));
        assert!(g.freq_axis().windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn shift_step_decimates_rows() {
        let cfg = CwtConfig {
            scales: ScaleSpec::Explicit(vec![8.0]),
            shift: 4,
            ..CwtConfig::default()
        };
        let g = cwt(&Signal::zeros(100, 1000.0).unwrap(), &cfg).unwrap();
        assert_eq!(g.rows(), 25);
        assert!((g.time_axis()[1] - 0.004).abs() < 1e-12);
    }
}
