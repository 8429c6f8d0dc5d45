//! Time-frequency distributions of heart-sound recordings and the tooling
//! around them: segmentation, image export, metrics and significance tests.

pub mod cli;
pub mod cohen;
pub mod dataset;
mod error;
pub mod evalstats;
pub mod imaging;
pub mod refclf;
pub mod sigcore;
pub mod tfd;

pub use error::{Error, Result};

/// Version string written into every manifest and report.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
