//! Handwritten digit recognition toolkit.
//!
//! The pipeline: load grayscale samples (PGM files, IDX pairs, or labeled
//! directory trees), normalize each glyph to a 32x32 binary image (bounding
//! box, bilinear rescale, thresholding), extract an 88-element feature vector
//! (72 octant shadow features over three concentric windows plus 16 octant
//! centroid features), and classify with a one-hidden-layer sigmoid MLP
//! trained by online backpropagation with momentum. The `eval` module adds
//! stratified k-fold cross-validation and a hidden-layer-size sweep.
//!
//! Batch operations (normalization, feature extraction, folds, sweep points)
//! run data-parallel under the default `parallel` feature and fall back to
//! sequential loops without it. Results are identical either way: batch maps
//! preserve input order and every per-sample computation is deterministic.

pub mod dataset;
pub mod error;
pub mod eval;
pub mod features;
pub mod mlp;
mod par;
pub mod preprocess;
pub mod rng;

pub use error::{Error, Result};
