//! Shared test support for the workspace: an independently written
//! brute-force feature extractor, a finite-difference gradient oracle,
//! random image generators, and a synthetic stroke-rendered digit corpus
//! exported in IDX format.
//!
//! Everything here exists to check the production code from a second angle,
//! so none of it reuses the implementation paths it validates.

mod brute;
mod corpus;
mod gradcheck;
mod images;

pub use brute::brute_extract_features;
pub use corpus::{render_digit, write_synthetic_idx, SyntheticCorpus};
pub use gradcheck::{fd_gradients, max_gradient_mismatch};
pub use images::{pad_uniform, random_binary32, random_glyph, rotate90cw};
