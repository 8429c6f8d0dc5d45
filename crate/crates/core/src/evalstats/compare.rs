use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use statrs::statistics::{Data, Median};

use super::mannwhitney::{mann_whitney_u, MwMode};
use crate::error::{ensure, Error, Result};

/// p above this means no significant difference.
pub const SIGNIFICANCE_LEVEL: f64 = 0.05;

/// Per-seed scores of one condition and their summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedAggregate {
    pub values: Vec<f64>,
    pub mean: f64,
    pub median: f64,
    pub min: f64,
    pub max: f64,
}

impl SeedAggregate {
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        ensure!(!values.is_empty(), "no per-seed values");
        ensure!(
            values.iter().all(|v| v.is_finite()),
            "per-seed values must be finite"
        );
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let median = Data::new(values.clone()).median();
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(SeedAggregate {
            values,
            mean,
            median,
            min,
            max,
        })
    }
}

/// Named per-seed results, the input unit of `compare`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionResult {
    pub condition: String,
    pub macc: SeedAggregate,
}

pub fn write_condition(path: &Path, r: &ConditionResult) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(r)? + "\n")?;
    Ok(())
}

pub fn read_condition(path: &Path) -> Result<ConditionResult> {
    if !path.exists() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    let r: ConditionResult = serde_json::from_slice(&std::fs::read(path)?)
        .map_err(|e| Error::format(path.display().to_string(), e.to_string()))?;
    // Recompute so a hand-edited summary cannot disagree with its values.
    Ok(ConditionResult {
        macc: SeedAggregate::from_values(r.macc.values)?,
        ..r
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairResult {
    pub a: String,
    pub b: String,
    pub u: f64,
    pub p: f64,
    pub mode: MwMode,
    pub significant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTable {
    pub threshold: f64,
    pub conditions: Vec<String>,
    pub medians: Vec<f64>,
    /// Symmetric p-value matrix indexed like `conditions`.
    pub p_values: Vec<Vec<f64>>,
    pub pairs: Vec<PairResult>,
}

impl ComparisonTable {
    pub fn p(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.conditions.iter().position(|c| c == a)?;
        let j = self.conditions.iter().position(|c| c == b)?;
        Some(self.p_values[i][j])
    }
}

/// Mann-Whitney p for every unordered pair of conditions.
pub fn compare_conditions(
    results: &BTreeMap<String, SeedAggregate>,
    mode: MwMode,
) -> Result<ComparisonTable> {
    for (name, agg) in results {
        ensure!(
            agg.values.len() >= 2,
            "condition '{name}' has {} seed(s); at least 2 are needed",
            agg.values.len()
        );
    }
    let conditions: Vec<String> = results.keys().cloned().collect();
    let k = conditions.len();
    let mut p_values = vec![vec![1.0; k]; k];
    let mut pairs = Vec::new();
    for i in 0..k {
        for j in i..k {
            let (a, b) = (&results[&conditions[i]], &results[&conditions[j]]);
            let r = mann_whitney_u(&a.values, &b.values, mode)?;
            p_values[i][j] = r.p_two_sided;
            p_values[j][i] = r.p_two_sided;
            if i != j {
                pairs.push(PairResult {
                    a: conditions[i].clone(),
                    b: conditions[j].clone(),
                    u: r.u,
                    p: r.p_two_sided,
                    mode: r.mode,
                    significant: r.p_two_sided <= SIGNIFICANCE_LEVEL,
                });
            }
        }
    }
    Ok(ComparisonTable {
        threshold: SIGNIFICANCE_LEVEL,
        medians: conditions.iter().map(|c| results[c].median).collect(),
        conditions,
        p_values,
        pairs,
    })
}
