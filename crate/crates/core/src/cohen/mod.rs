//! Cohen's-class bilinear distributions.
//!
//! All variants share one discretization: the (analytic) signal is
//! interpolated by two so that `z(t + tau/2) z*(t - tau/2)` lands on grid
//! points for every integer lag `tau`, giving the instantaneous
//! autocorrelation `K[n, m] = z2[2n + m] * conj(z2[2n - m])`. The lag
//! transform is evaluated at `freq_bins` points over one period; lags beyond
//! that length fold onto the same bins, which samples the full lag sum
//! exactly. Each value carries the `1/fs` lag-step factor so that summing a
//! row over frequency (times `fs / freq_bins`) recovers `|z(n)|^2`.

mod ambiguity;
mod kernel;
mod wvd;

pub use ambiguity::{ambiguity, AmbiguitySurface};
pub use kernel::{MAX_AMBIGUITY_SAMPLES, MAX_SAMPLES};
pub use wvd::{cohen, cwd, pseudo_wvd, spwvd, wvd};

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::sigcore::WindowSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CohenVariant {
    Wvd,
    Spwvd,
    Cwd,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CohenConfig {
    pub variant: CohenVariant,
    /// Choi-Williams kernel parameter in `exp(-sigma (eta tau)^2)`.
    pub cwd_sigma: f64,
    /// Smoothing along time; `None` means a Gaussian one tenth of the signal long.
    pub time_smoothing: Option<WindowSpec>,
    /// Lag window; `None` means a Hann window one quarter of the signal long.
    pub freq_smoothing: Option<WindowSpec>,
    pub use_analytic: bool,
    /// Points of the lag transform over one frequency period; the grid keeps
    /// `freq_bins / 2 + 1` of them, from 0 to `fs / 2`.
    pub freq_bins: usize,
}

impl Default for CohenConfig {
    fn default() -> Self {
        Self {
            variant: CohenVariant::Wvd,
            cwd_sigma: 3.0,
            time_smoothing: None,
            freq_smoothing: None,
            use_analytic: true,
            freq_bins: 512,
        }
    }
}

impl CohenConfig {
    pub fn with_variant(variant: CohenVariant) -> Self {
        Self {
            variant,
            ..Self::default()
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        ensure!(
            self.freq_bins >= 4 && self.freq_bins.is_multiple_of(2),
            "freq_bins must be even and at least 4, got {}",
            self.freq_bins
        );
        ensure!(
            self.cwd_sigma.is_finite() && self.cwd_sigma >= 0.0,
            "cwd sigma must be non-negative, got {}",
            self.cwd_sigma
        );
        Ok(())
    }

    pub fn time_window(&self, signal_len: usize) -> WindowSpec {
        self.time_smoothing
            .unwrap_or_else(|| WindowSpec::gaussian((signal_len / 10).max(1)))
    }

    pub fn lag_window(&self, signal_len: usize) -> WindowSpec {
        self.freq_smoothing
            .unwrap_or_else(|| WindowSpec::hann((signal_len / 4).max(1)))
    }
}
