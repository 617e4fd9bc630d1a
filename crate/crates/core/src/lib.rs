//! Lattice points in the thin annulus of width √2 around the circle of
//! radius `R`, the areas of their unit squares that fall inside the disc,
//! and the statistics built on top of those areas.
//!
//! Module map:
//!
//! * [`lattice`]: enumeration and angular ordering of the annulus points.
//! * [`geometry`]: exact square/disc areas and the straight-boundary limit
//!   functional `A∞(r, θ)`.
//! * [`model`]: the tilted semi-infinite rectangle model and Monte Carlo
//!   estimates of the model correlations.
//! * [`statistics`]: empirical estimators over the annulus points.
//! * [`spectral`]: interval Fourier transforms, the sector variance
//!   constant and narrow-sector counts.

// `!(x <= y)` is used on purpose so that NaN fails range checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod geometry;
pub mod interval;
pub mod lattice;
pub mod model;
pub mod numeric;
pub mod sampling;
pub mod spectral;
pub mod statistics;

pub use error::{Error, Result};
pub use interval::IntervalSpec;
pub use lattice::{enumerate_gamma, AnnulusPoint, GammaList, LatticePoint};
pub use statistics::{AreaSeries, CorrelationEstimate};

/// Half-width of the annulus, `1/√2`.
pub const HALF_WIDTH: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// `2π`.
pub const TAU: f64 = std::f64::consts::TAU;

/// Area of the annulus of half-width `1/√2` around radius `R`: `√8·π·R`.
pub fn cal_k(radius: f64) -> f64 {
    8f64.sqrt() * std::f64::consts::PI * radius
}
