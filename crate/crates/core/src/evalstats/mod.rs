//! Confusion metrics, rank-based significance tests and multi-seed summaries.

mod compare;
mod confusion;
mod mannwhitney;

pub use compare::{
    compare_conditions, read_condition, write_condition, ComparisonTable, ConditionResult,
    PairResult, SeedAggregate, SIGNIFICANCE_LEVEL,
};
pub use confusion::{
    confusion, metrics, read_predictions, write_predictions, ConfusionCounts, EvalReport,
    MetricsReport, Prediction,
};
pub use mannwhitney::{exact_distribution, mann_whitney_u, MwMode, MwResult, EXACT_LIMIT};
