//! Simulation and verification toolkit for H-self-similar processes.
//!
//! The crate generates sample paths of self-similar processes (Brownian
//! motion, fractional Brownian motion, deterministic power paths) on uniform
//! grids, computes their running-maximum record structure, applies the
//! rescaling transforms built on first-passage times (co-ascent, exponential
//! log-time rescaling, excursion from the maximum), and samples from the
//! record-measure Palm distribution by importance weighting against the
//! scale-invariant hyperbolic measure.
//!
//! Everything is deterministic given a seed: the same generator
//! configuration always produces the bit-identical path, and every
//! downstream transform is a pure function of immutable inputs.

pub mod error;
pub mod fgn;
pub mod palm;
pub mod pathgen;
pub mod records;
pub mod report;
pub mod stattest;
pub mod transform;

pub use error::{Error, Result};
