//! CNN-input rasters: grid and waveform rendering, standardization, channel
//! stacking, and the on-disk formats.

mod io;
mod raster;
mod waveform;

pub use io::{
    decode_grid, decode_tensor, encode_grid, encode_tensor, image_file_name, read_png, write_png,
    GRID_MAGIC, TENSOR_MAGIC,
};
pub use raster::{bilinear_resize, grid_to_image, normalize, replicate3, stack3};
pub use waveform::{render_waveform, CANVAS_SIZE};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tfd::TfdKind;

pub const DEFAULT_SIZE: (usize, usize) = (224, 224);

/// What a single image channel was rendered from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputKind {
    Stft,
    Cwt,
    Chirplet,
    Wvd,
    Spwvd,
    Cwd,
    Raw,
    Lograw,
}

impl InputKind {
    pub const ALL: [InputKind; 8] = [
        InputKind::Stft,
        InputKind::Cwt,
        InputKind::Chirplet,
        InputKind::Wvd,
        InputKind::Spwvd,
        InputKind::Cwd,
        InputKind::Raw,
        InputKind::Lograw,
    ];

    pub fn name(self) -> &'static str {
        match self {
            InputKind::Raw => "raw",
            InputKind::Lograw => "lograw",
            other => other.tfd().map(TfdKind::name).unwrap_or(""),
        }
    }

    pub fn tfd(self) -> Option<TfdKind> {
        match self {
            InputKind::Stft => Some(TfdKind::Stft),
            InputKind::Cwt => Some(TfdKind::Cwt),
            InputKind::Chirplet => Some(TfdKind::Chirplet),
            InputKind::Wvd => Some(TfdKind::Wvd),
            InputKind::Spwvd => Some(TfdKind::Spwvd),
            InputKind::Cwd => Some(TfdKind::Cwd),
            InputKind::Raw | InputKind::Lograw => None,
        }
    }

    pub fn valid_names() -> String {
        InputKind::ALL.map(InputKind::name).join(", ")
    }
}

impl From<TfdKind> for InputKind {
    fn from(k: TfdKind) -> Self {
        match k {
            TfdKind::Stft => InputKind::Stft,
            TfdKind::Cwt => InputKind::Cwt,
            TfdKind::Chirplet => InputKind::Chirplet,
            TfdKind::Wvd => InputKind::Wvd,
            TfdKind::Spwvd => InputKind::Spwvd,
            TfdKind::Cwd => InputKind::Cwd,
        }
    }
}

impl fmt::Display for InputKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InputKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        InputKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                Error::invalid(format!(
                    "unknown tfd '{s}' (valid: {})",
                    InputKind::valid_names()
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueSpace {
    /// Integer intensities 0..=255 (white = 255).
    Raster8,
    /// Zero-mean, unit-variance reals.
    NormalizedReal,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Provenance {
    pub segment_id: String,
    /// One entry per channel, in channel order.
    pub kinds: Vec<InputKind>,
}

/// H x W x C raster stored interleaved (HWC).
#[derive(Debug, Clone, PartialEq)]
pub struct ExportedImage {
    height: usize,
    width: usize,
    channels: usize,
    pixels: Vec<f64>,
    value_space: ValueSpace,
    provenance: Provenance,
}

impl ExportedImage {
    pub fn new(
        height: usize,
        width: usize,
        channels: usize,
        pixels: Vec<f64>,
        value_space: ValueSpace,
        provenance: Provenance,
    ) -> Result<Self> {
        if height == 0 || width == 0 || !(channels == 1 || channels == 3) {
            return Err(Error::invalid(format!(
                "bad image shape {height}x{width}x{channels}"
            )));
        }
        if pixels.len() != height * width * channels {
            return Err(Error::invalid(format!(
                "{} pixels for a {height}x{width}x{channels} image",
                pixels.len()
            )));
        }
        if pixels.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("non-finite pixel"));
        }
        Ok(Self {
            height,
            width,
            channels,
            pixels,
            value_space,
            provenance,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn value_space(&self) -> ValueSpace {
        self.value_space
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn with_segment(mut self, segment_id: impl Into<String>) -> Self {
        self.provenance.segment_id = segment_id.into();
        self
    }

    pub fn at(&self, y: usize, x: usize, c: usize) -> f64 {
        self.pixels[(y * self.width + x) * self.channels + c]
    }

    /// One channel as a single-channel image.
    pub fn channel(&self, c: usize) -> Result<ExportedImage> {
        if c >= self.channels {
            return Err(Error::invalid(format!(
                "channel {c} out of range for {} channels",
                self.channels
            )));
        }
        let pixels = self
            .pixels
            .iter()
            .skip(c)
            .step_by(self.channels)
            .copied()
            .collect();
        let kinds = self.provenance.kinds.get(c).copied().into_iter().collect();
        ExportedImage::new(
            self.height,
            self.width,
            1,
            pixels,
            self.value_space,
            Provenance {
                segment_id: self.provenance.segment_id.clone(),
                kinds,
            },
        )
    }

    pub fn mean_std(&self) -> (f64, f64) {
        let n = self.pixels.len() as f64;
        let mean = self.pixels.iter().sum::<f64>() / n;
        let var = self.pixels.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        (mean, var.sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn input_kind_parsing() {
        for k in InputKind::ALL {
            assert_eq!(k.name().parse::<InputKind>().unwrap(), k);
        }
        let err = "wigner".parse::<InputKind>().unwrap_err().to_string();
        assert!(err.contains("stft") && err.contains("lograw"));
    }

    #[test]
    fn shape_validation() {
        assert!(ExportedImage::new(
            2,
            2,
            2,
            vec![0.0; 8],
            ValueSpace::Raster8,
            Provenance::default()
        )
        .is_err());
        assert!(ExportedImage::new(
            2,
            2,
            1,
            vec![0.0; 3],
            ValueSpace::Raster8,
            Provenance::default()
        )
        .is_err());
        assert!(ExportedImage::new(
            2,
            2,
            3,
            vec![0.0; 12],
            ValueSpace::Raster8,
            Provenance::default()
        )
        .is_ok());
    }
}
