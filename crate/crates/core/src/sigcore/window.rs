use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};

/// Symmetric Hann window, `0.5 * (1 - cos(2 pi k / (n - 1)))`.
pub fn hann_window(n: usize) -> Result<Vec<f64>> {
    ensure!(n >= 1, "window length must be at least 1");
    if n == 1 {
        return Ok(vec![1.0]);
    }
    let denom = (n - 1) as f64;
    Ok((0..n)
        .map(|k| 0.5 * (1.0 - (2.0 * PI * k as f64 / denom).cos()))
        .collect())
}

/// Gaussian window centred at `(n - 1) / 2` with standard deviation `sigma` in samples.
pub fn gaussian_window(n: usize, sigma: f64) -> Result<Vec<f64>> {
    ensure!(n >= 1, "window length must be at least 1");
    ensure!(
        sigma.is_finite() && sigma > 0.0,
        "gaussian sigma must be positive, got {sigma}"
    );
    let centre = (n - 1) as f64 / 2.0;
    Ok((0..n)
        .map(|k| {
            let u = (k as f64 - centre) / sigma;
            (-0.5 * u * u).exp()
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowKind {
    Hann,
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub kind: WindowKind,
    pub length: usize,
    /// Gaussian standard deviation in samples; `None` means `length / 8`.
    pub sigma: Option<f64>,
}

impl WindowSpec {
    pub fn hann(length: usize) -> Self {
        Self {
            kind: WindowKind::Hann,
            length,
            sigma: None,
        }
    }

    pub fn gaussian(length: usize) -> Self {
        Self {
            kind: WindowKind::Gaussian,
            length,
            sigma: None,
        }
    }

    pub fn gaussian_with_sigma(length: usize, sigma: f64) -> Self {
        Self {
            kind: WindowKind::Gaussian,
            length,
            sigma: Some(sigma),
        }
    }

    pub fn effective_sigma(&self) -> f64 {
        self.sigma.unwrap_or(self.length as f64 / 8.0)
    }

    pub fn build(&self) -> Result<Vec<f64>> {
        match self.kind {
            WindowKind::Hann => hann_window(self.length),
            WindowKind::Gaussian => gaussian_window(self.length, self.effective_sigma()),
        }
    }
}
