//! Stochastic direct search with poll directions drawn in random subspaces.
//!
//! The solver polls along `U d`, where `U` holds the first `p` columns of a
//! Haar-distributed orthogonal matrix and `d` runs over a positive spanning
//! set of `R^p`, and accepts a step only when Monte-Carlo estimates show a
//! sufficient decrease. Full-space baselines, Monte-Carlo checks of the
//! underlying geometry and a data-profile benchmark harness come with it.

pub mod bench;
pub mod config;
pub mod diagnostics;
pub mod error;
pub mod estimator;
pub mod geometry;
pub mod par;
pub mod problems;
pub mod rng;
pub mod solver;

pub use error::{Error, Result};
pub use par::Parallelism;
pub use rng::{StreamKind, Streams};
