//! Linear and atomic-decomposition transforms, plus the grid type every
//! transform returns.

mod chirplet;
mod cwt;
mod grid;
mod stft;

pub use chirplet::{chirplet, ChirpletConfig};
pub use cwt::{cwt, morlet_spectrum, pseudo_frequency, CwtConfig, ScaleSpec};
pub(crate) use grid::meta_from;
pub use grid::{TfdGrid, TfdKind};
pub use stft::{stft, StftConfig};
