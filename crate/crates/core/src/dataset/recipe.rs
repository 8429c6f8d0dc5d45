use serde::{Deserialize, Serialize};

/// Optimizer settings that accompany every exported image batch.
///
/// Nothing in this crate trains with these; they travel with the data so a
/// downstream trainer can be configured consistently.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingRecipe {
    pub optimizer: String,
    pub weight_decay: f64,
    pub lr_initial: f64,
    pub lr_min: f64,
    pub schedule: String,
    pub epochs: u32,
    pub batch_size: u32,
    pub repeats: u32,
}

impl Default for TrainingRecipe {
    fn default() -> Self {
        TrainingRecipe {
            optimizer: "AdamW".into(),
            weight_decay: 1e-2,
            lr_initial: 1e-2,
            lr_min: 1e-6,
            schedule: "cosine".into(),
            epochs: 50,
            batch_size: 128,
            repeats: 10,
        }
    }
}

impl TrainingRecipe {
    /// Learning rate at the start of `epoch` (0-based) under cosine decay.
    pub fn learning_rate(&self, epoch: u32) -> f64 {
        let t = (epoch.min(self.epochs) as f64) / self.epochs.max(1) as f64;
        self.lr_min
            + 0.5 * (self.lr_initial - self.lr_min) * (1.0 + (std::f64::consts::PI * t).cos())
    }
}
