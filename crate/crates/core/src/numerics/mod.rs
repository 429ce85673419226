//! Numeric substrate: quadrature, grids, monotonicity and sign-change scans.

mod grid;
mod monotone;
mod quadrature;
pub mod special;

pub use grid::{Grid, Spacing};
pub use monotone::{find_sign_change, is_monotone, Direction, MonotoneVerdict};
pub use quadrature::{
    integrate_finite, integrate_finite_with, integrate_semi_infinite, integrate_tail_with,
    QuadOptions, QuadratureResult, DEFAULT_MAX_EVALS, DEFAULT_TOL,
};

/// Absolute tolerance used by monotonicity and pointwise checks.
pub const DEFAULT_CHECK_TOL: f64 = 1e-7;
