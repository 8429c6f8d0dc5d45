//! A one-hidden-layer softmax classifier over pooled image features.
//!
//! It exists to close the loop from synthetic audio to metrics in seconds;
//! it is not meant to be a competitive model.

mod params;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::Label;
use crate::error::{ensure, Error, Result};
use crate::imaging::{ExportedImage, ValueSpace};

pub use params::{decode_params, encode_params, ClassifierParams, PARAMS_MAGIC};

pub const POOL: usize = 8;
pub const CLASSES: usize = 2;

/// 8×8 average pooling per channel, flattened channel-major then row-major.
pub fn pool_features(img: &ExportedImage) -> Result<Vec<f64>> {
    ensure!(
        img.value_space() == ValueSpace::NormalizedReal,
        "pooling needs a normalized image; normalize the raster first"
    );
    let (h, w, c) = (img.height(), img.width(), img.channels());
    ensure!(
        h % POOL == 0 && w % POOL == 0,
        "image size {h}x{w} is not a multiple of {POOL}"
    );
    let (ph, pw) = (h / POOL, w / POOL);
    let mut out = vec![0.0; c * ph * pw];
    let px = img.pixels();
    for y in 0..h {
        for x in 0..w {
            for ch in 0..c {
                out[ch * ph * pw + (y / POOL) * pw + x / POOL] += px[(y * w + x) * c + ch];
            }
        }
    }
    let scale = 1.0 / (POOL * POOL) as f64;
    out.iter_mut().for_each(|v| *v *= scale);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Example {
    pub features: Vec<f64>,
    pub label: Label,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub hidden_units: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.05,
            epochs: 100,
            batch_size: 32,
            seed: 0,
            hidden_units: 64,
        }
    }
}

impl TrainConfig {
    fn validate(&self) -> Result<()> {
        ensure!(
            self.learning_rate.is_finite() && self.learning_rate > 0.0,
            "learning rate must be positive"
        );
        ensure!(self.epochs > 0, "epochs must be positive");
        ensure!(self.batch_size > 0, "batch size must be positive");
        ensure!(self.hidden_units > 0, "hidden units must be positive");
        Ok(())
    }
}

struct Forward {
    hidden: Vec<f64>,
    probs: [f64; CLASSES],
}

fn forward(p: &ClassifierParams, x: &[f64]) -> Forward {
    let hidden: Vec<f64> = (0..p.hidden)
        .map(|j| {
            let row = &p.w1[j * p.input..(j + 1) * p.input];
            let z: f64 = row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + p.b1[j];
            z.tanh()
        })
        .collect();
    let mut logits = [0.0; CLASSES];
    for (k, l) in logits.iter_mut().enumerate() {
        let row = &p.w2[k * p.hidden..(k + 1) * p.hidden];
        *l = row.iter().zip(&hidden).map(|(w, h)| w * h).sum::<f64>() + p.b2[k];
    }
    let m = logits[0].max(logits[1]);
    let e = [(logits[0] - m).exp(), (logits[1] - m).exp()];
    let s = e[0] + e[1];
    Forward {
        hidden,
        probs: [e[0] / s, e[1] / s],
    }
}

/// Mean softmax cross-entropy over `batch` and its gradient, laid out like
/// the parameters.
pub fn loss_and_grad(p: &ClassifierParams, batch: &[&Example]) -> Result<(f64, ClassifierParams)> {
    ensure!(!batch.is_empty(), "empty batch");
    for ex in batch {
        ensure!(
            ex.features.len() == p.input,
            "feature length {} does not match classifier input {}",
            ex.features.len(),
            p.input
        );
    }
    let mut g = ClassifierParams::zeros(p.input, p.hidden);
    let mut loss = 0.0;
    let inv = 1.0 / batch.len() as f64;
    let mut dh = vec![0.0; p.hidden];
    for ex in batch {
        let f = forward(p, &ex.features);
        let y = ex.label.index();
        loss -= f.probs[y].max(f64::MIN_POSITIVE).ln();
        let dz = [
            (f.probs[0] - (y == 0) as u8 as f64) * inv,
            (f.probs[1] - (y == 1) as u8 as f64) * inv,
        ];
        for (k, &d) in dz.iter().enumerate() {
            g.b2[k] += d;
            let row = &mut g.w2[k * p.hidden..(k + 1) * p.hidden];
            for (gw, h) in row.iter_mut().zip(&f.hidden) {
                *gw += d * h;
            }
        }
        for (j, (d, h)) in dh.iter_mut().zip(&f.hidden).enumerate() {
            let back = p.w2[j] * dz[0] + p.w2[p.hidden + j] * dz[1];
            *d = back * (1.0 - h * h);
        }
        for (j, &d) in dh.iter().enumerate() {
            g.b1[j] += d;
            let row = &mut g.w1[j * p.input..(j + 1) * p.input];
            for (gw, v) in row.iter_mut().zip(&ex.features) {
                *gw += d * v;
            }
        }
    }
    Ok((loss * inv, g))
}

/// Draw initial parameters: uniform in ±1/√fan_in.
///
/// Both output rows share one draw, which makes training equivariant under
/// swapping the class labels.
pub fn init_params(input: usize, hidden: usize, seed: u64) -> ClassifierParams {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = ClassifierParams::zeros(input, hidden);
    let a1 = 1.0 / (input as f64).sqrt();
    p.w1.iter_mut().for_each(|w| *w = rng.random_range(-a1..a1));
    p.b1.iter_mut().for_each(|b| *b = rng.random_range(-a1..a1));
    let a2 = 1.0 / (hidden as f64).sqrt();
    for j in 0..hidden {
        let w = rng.random_range(-a2..a2);
        p.w2[j] = w;
        p.w2[hidden + j] = w;
    }
    p
}

/// Plain mini-batch gradient descent; the batch order is reshuffled every
/// epoch from the seed.
pub fn train(data: &[Example], cfg: &TrainConfig) -> Result<ClassifierParams> {
    Ok(train_with_history(data, cfg)?.0)
}

/// Like [`train`], also returning the mean training loss of every epoch
/// measured before that epoch's updates.
pub fn train_with_history(
    data: &[Example],
    cfg: &TrainConfig,
) -> Result<(ClassifierParams, Vec<f64>)> {
    cfg.validate()?;
    ensure!(!data.is_empty(), "no training examples");
    let input = data[0].features.len();
    ensure!(input > 0, "empty feature vectors");
    ensure!(
        data.iter().all(|e| e.features.len() == input),
        "feature vectors have differing lengths"
    );
    for label in Label::ALL {
        if !data.iter().any(|e| e.label == label) {
            return Err(Error::invalid(format!(
                "training data has no {label} examples; both classes are required"
            )));
        }
    }
    let mut p = init_params(input, cfg.hidden_units, cfg.seed);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(1);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let all: Vec<&Example> = data.iter().collect();
    let mut history = Vec::with_capacity(cfg.epochs);
    for _ in 0..cfg.epochs {
        history.push(loss_and_grad(&p, &all)?.0);
        order.shuffle(&mut rng);
        for chunk in order.chunks(cfg.batch_size) {
            let batch: Vec<&Example> = chunk.iter().map(|&i| &data[i]).collect();
            let (_, g) = loss_and_grad(&p, &batch)?;
            p.step(&g, cfg.learning_rate);
        }
    }
    ensure!(p.is_finite(), "training diverged; lower the learning rate");
    Ok((p, history))
}

/// Class probabilities `[normal, abnormal]` per feature vector.
pub fn predict_proba(p: &ClassifierParams, features: &[Vec<f64>]) -> Result<Vec<[f64; CLASSES]>> {
    for f in features {
        ensure!(
            f.len() == p.input,
            "feature length {} does not match classifier input {}",
            f.len(),
            p.input
        );
    }
    Ok(features.iter().map(|f| forward(p, f).probs).collect())
}

/// Argmax class; an exact tie goes to Normal.
pub fn predict(p: &ClassifierParams, features: &[Vec<f64>]) -> Result<Vec<Label>> {
    Ok(predict_proba(p, features)?
        .into_iter()
        .map(|pr| Label::from_index((pr[1] > pr[0]) as usize))
        .collect())
}
