use serde::{Deserialize, Serialize};

use super::CLASSES;
use crate::error::{ensure, Error, Result};

pub const PARAMS_MAGIC: &[u8; 4] = b"TFDP";
const VERSION: u16 = 1;

/// Weights of the reference classifier. Matrices are row-major:
/// `w1` is hidden × input and `w2` is classes × hidden.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierParams {
    pub input: usize,
    pub hidden: usize,
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
}

impl ClassifierParams {
    pub fn zeros(input: usize, hidden: usize) -> Self {
        ClassifierParams {
            input,
            hidden,
            w1: vec![0.0; hidden * input],
            b1: vec![0.0; hidden],
            w2: vec![0.0; CLASSES * hidden],
            b2: vec![0.0; CLASSES],
        }
    }

    fn blocks(&self) -> [&[f64]; 4] {
        [&self.w1, &self.b1, &self.w2, &self.b2]
    }

    fn blocks_mut(&mut self) -> [&mut Vec<f64>; 4] {
        [&mut self.w1, &mut self.b1, &mut self.w2, &mut self.b2]
    }

    /// All parameters in storage order.
    pub fn flatten(&self) -> Vec<f64> {
        self.blocks().concat()
    }

    /// Overwrite from a vector in [`flatten`](Self::flatten) order.
    pub fn set_flat(&mut self, flat: &[f64]) -> Result<()> {
        ensure!(
            flat.len() == self.len(),
            "expected {} values, got {}",
            self.len(),
            flat.len()
        );
        let mut off = 0;
        for b in self.blocks_mut() {
            let n = b.len();
            b.copy_from_slice(&flat[off..off + n]);
            off += n;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.blocks().iter().map(|b| b.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_finite(&self) -> bool {
        self.blocks()
            .iter()
            .all(|b| b.iter().all(|v| v.is_finite()))
    }

    pub(super) fn step(&mut self, grad: &ClassifierParams, lr: f64) {
        for (p, g) in self.blocks_mut().into_iter().zip(grad.blocks()) {
            for (a, b) in p.iter_mut().zip(g) {
                *a -= lr * b;
            }
        }
    }
}

/// Container: magic, version (u16), input, hidden and classes (u32), then
/// `w1, b1, w2, b2` as little-endian f64.
pub fn encode_params(p: &ClassifierParams) -> Vec<u8> {
    let mut out = Vec::with_capacity(18 + 8 * p.len());
    out.extend_from_slice(PARAMS_MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    for d in [p.input, p.hidden, CLASSES] {
        out.extend_from_slice(&(d as u32).to_le_bytes());
    }
    for v in p.flatten() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_params(bytes: &[u8]) -> Result<ClassifierParams> {
    let bad = |m: &str| Error::format("params container", m);
    if bytes.len() < 18 || &bytes[..4] != PARAMS_MAGIC {
        return Err(bad("bad magic or truncated header"));
    }
    if u16::from_le_bytes([bytes[4], bytes[5]]) != VERSION {
        return Err(bad("unsupported version"));
    }
    let dim = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap()) as usize;
    let (input, hidden, classes) = (dim(6), dim(10), dim(14));
    if classes != CLASSES {
        return Err(bad("unsupported class count"));
    }
    let mut p = ClassifierParams::zeros(input, hidden);
    let body = &bytes[18..];
    if body.len() != 8 * p.len() {
        return Err(bad("size does not match header"));
    }
    let flat: Vec<f64> = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    p.set_flat(&flat)?;
    Ok(p)
}
