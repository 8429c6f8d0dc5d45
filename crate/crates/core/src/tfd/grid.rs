use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TfdKind {
    Stft,
    Cwt,
    Chirplet,
    Wvd,
    Spwvd,
    Cwd,
}

impl TfdKind {
    pub const ALL: [TfdKind; 6] = [
        TfdKind::Stft,
        TfdKind::Cwt,
        TfdKind::Chirplet,
        TfdKind::Wvd,
        TfdKind::Spwvd,
        TfdKind::Cwd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TfdKind::Stft => "stft",
            TfdKind::Cwt => "cwt",
            TfdKind::Chirplet => "chirplet",
            TfdKind::Wvd => "wvd",
            TfdKind::Spwvd => "spwvd",
            TfdKind::Cwd => "cwd",
        }
    }

    /// Cohen's-class outputs carry signed values.
    pub fn is_bilinear(self) -> bool {
        matches!(self, TfdKind::Wvd | TfdKind::Spwvd | TfdKind::Cwd)
    }
}

impl fmt::Display for TfdKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TfdKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TfdKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::invalid(format!("unknown tfd '{s}'")))
    }
}

/// A time x frequency matrix with physical axes.
///
/// Rows are time bins (seconds), columns are frequency bins (Hz). Values are
/// stored row-major. Linear transforms store magnitudes, bilinear ones keep
/// their sign.
#[derive(Debug, Clone, PartialEq)]
pub struct TfdGrid {
    values: Vec<f64>,
    time_axis: Vec<f64>,
    freq_axis: Vec<f64>,
    kind: TfdKind,
    meta: BTreeMap<String, String>,
}

fn strictly_monotonic(axis: &[f64]) -> bool {
    if axis.len() < 2 {
        return true;
    }
    let up = axis.windows(2).all(|w| w[1] > w[0]);
    let down = axis.windows(2).all(|w| w[1] < w[0]);
    up || down
}

impl TfdGrid {
    pub fn new(
        kind: TfdKind,
        time_axis: Vec<f64>,
        freq_axis: Vec<f64>,
        values: Vec<f64>,
        meta: BTreeMap<String, String>,
    ) -> Result<Self> {
        let (rows, cols) = (time_axis.len(), freq_axis.len());
        if rows == 0 || cols == 0 {
            return Err(Error::invalid(format!("empty grid {rows}x{cols}")));
        }
        if values.len() != rows * cols {
            return Err(Error::invalid(format!(
                "grid has {} values, axes imply {rows}x{cols}",
                values.len()
            )));
        }
        if time_axis.iter().chain(&freq_axis).any(|v| !v.is_finite()) {
            return Err(Error::invalid("non-finite axis value"));
        }
        if !time_axis.windows(2).all(|w| w[1] > w[0]) {
            return Err(Error::invalid("time axis must be strictly increasing"));
        }
        if !strictly_monotonic(&freq_axis) {
            return Err(Error::invalid("frequency axis must be strictly monotonic"));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("grid value {i} is not finite")));
        }
        Ok(Self {
            values,
            time_axis,
            freq_axis,
            kind,
            meta,
        })
    }

    pub fn kind(&self) -> TfdKind {
        self.kind
    }

    pub fn rows(&self) -> usize {
        self.time_axis.len()
    }

    pub fn cols(&self) -> usize {
        self.freq_axis.len()
    }

    pub fn time_axis(&self) -> &[f64] {
        &self.time_axis
    }

    pub fn freq_axis(&self) -> &[f64] {
        &self.freq_axis
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn meta(&self) -> &BTreeMap<String, String> {
        &self.meta
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols() + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        let c = self.cols();
        &self.values[row * c..(row + 1) * c]
    }

    /// Column index of the largest value in `row` (first one on ties).
    pub fn row_argmax(&self, row: usize) -> usize {
        let mut best = 0;
        let r = self.row(row);
        for (i, v) in r.iter().enumerate() {
            if *v > r[best] {
                best = i;
            }
        }
        best
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

pub(crate) fn meta_from<I, K, V>(items: I) -> BTreeMap<String, String>
where
    I: IntoIterator<Item = (K, V)>,
    K: Into<String>,
    V: ToString,
{
    items
        .into_iter()
        .map(|(k, v)| (k.into(), v.to_string()))
        .collect()
}
