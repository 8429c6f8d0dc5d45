//! Signal containers and the numeric building blocks shared by every transform.

mod analytic;
mod fft;
mod resample;
mod window;

pub use analytic::analytic;
pub use fft::{dft, dft_real, fft_in_place, idft, next_pow2};
pub use resample::resample;
pub use window::{gaussian_window, hann_window, WindowKind, WindowSpec};

pub use rustfft::num_complex::Complex64;

use crate::error::{ensure, Result};

/// Complex samples sharing the indexing of the signal they came from.
pub type ComplexSequence = Vec<Complex64>;

/// A finite, real-valued sample sequence with its sample rate.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    samples: Vec<f64>,
    sample_rate: f64,
}

impl Signal {
    pub fn new(samples: Vec<f64>, sample_rate: f64) -> Result<Self> {
        ensure!(
            sample_rate.is_finite() && sample_rate > 0.0,
            "sample rate must be positive, got {sample_rate}"
        );
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(crate::Error::invalid(format!("sample {i} is not finite")));
        }
        Ok(Self {
            samples,
            sample_rate,
        })
    }

    pub fn zeros(len: usize, sample_rate: f64) -> Result<Self> {
        Self::new(vec![0.0; len], sample_rate)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate
    }

    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|v| v * v).sum()
    }

    /// Copy of `[start, start + len)`; fails when the range overruns the signal.
    pub fn slice(&self, start: usize, len: usize) -> Result<Signal> {
        ensure!(
            start + len <= self.samples.len(),
            "slice [{start}, {}) exceeds signal length {}",
            start + len,
            self.samples.len()
        );
        Ok(Signal {
            samples: self.samples[start..start + len].to_vec(),
            sample_rate: self.sample_rate,
        })
    }

    pub(crate) fn require_len(&self, min: usize, what: &str) -> Result<()> {
        ensure!(
            self.samples.len() >= min,
            "{what} needs at least {min} samples, got {}",
            self.samples.len()
        );
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_and_bad_rate() {
        assert!(Signal::new(vec![0.0, f64::NAN], 100.0).is_err());
        assert!(Signal::new(vec![0.0, f64::INFINITY], 100.0).is_err());
        assert!(Signal::new(vec![0.0], 0.0).is_err());
        assert!(Signal::new(vec![0.0], -5.0).is_err());
    }

    #[test]
    fn slice_bounds() {
        let s = Signal::new((0..10).map(f64::from).collect(), 10.0).unwrap();
        assert_eq!(s.slice(2, 3).unwrap().samples(), &[2.0, 3.0, 4.0]);
        assert!(s.slice(8, 3).is_err());
        assert!((s.duration() - 1.0).abs() < 1e-15);
    }
}
