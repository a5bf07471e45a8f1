//! Sampling and measurement toolkit for the uniform spanning tree (UST) on
//! finite boxes of the square lattice.
//!
//! The crate provides:
//!
//! * [`wilson`] — loop-erased random walk, Wilson's algorithm, UST sampling
//!   with wired or free boundary, and an exact matrix-tree counting oracle;
//! * [`metrics`] — the intrinsic tree metric, the Schramm metric (Euclidean
//!   diameter of tree paths), intrinsic balls and volumes, covering numbers,
//!   and uniform-volume / ball-inclusion diagnostics;
//! * [`walk`] — simple random walk on a sampled tree, exit times from
//!   intrinsic balls, deterministic heat-kernel iteration, and effective
//!   resistance;
//! * [`spatial`] — finite measured rooted spatial trees, rescaling,
//!   restriction, exact Prohorov distances, and a certified upper-bound
//!   surrogate for the Gromov-Hausdorff-Prohorov-type distance on spatial
//!   trees;
//! * [`estimators`] — log-log regression with confidence intervals,
//!   chi-square uniformity tests, bootstrap errors and split-sample checks.
//!
//! Floating-point numerics (heat kernels, spatial-tree distances, fits) are
//! generic over the scalar type through `num-traits`; lattice geometry and
//! tree counting use exact integer arithmetic throughout. The [`Real`] alias
//! fixes the scalar the higher-level experiment code runs at.

pub mod error;
pub mod estimators;
pub mod graph;
pub mod lattice;
pub mod metrics;
pub mod rng;
pub mod snapshot;
pub mod spatial;
pub mod walk;
pub mod wilson;

pub use error::{Error, Result};

/// Scalar type used by the experiment pipelines.
pub type Real = f64;

/// Measured rooted spatial tree at the default scalar.
pub type SpatialTree = spatial::MeasuredSpatialTree<Real>;

/// Exponent fit at the default scalar.
pub type Fit = estimators::ExponentFit<Real>;

/// Growth exponent of the two-dimensional loop-erased random walk, 5/4.
///
/// Intrinsic distances on the UST scale like Euclidean distances raised to
/// this power.
pub const LERW_GROWTH_EXPONENT: f64 = 1.25;

/// Volume growth exponent of intrinsic balls on the UST, 8/5 = 2 / (5/4).
pub const VOLUME_GROWTH_EXPONENT: f64 = 1.6;

/// Walk dimension of the simple random walk on the UST, 13/5 = 1 + 8/5.
pub const WALK_DIMENSION: f64 = 2.6;

/// Spectral dimension of the simple random walk on the UST, 16/13.
pub const SPECTRAL_DIMENSION: f64 = 16.0 / 13.0;
