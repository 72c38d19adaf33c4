//! Shared numerical primitives: scaled special functions, adaptive
//! quadrature, circular arithmetic and reproducible random sampling.

mod bessel;
mod circular;
mod quadrature;
mod rng;

pub use bessel::{bessel_i0_scaled, bessel_i1_scaled, bessel_ratio, laguerre_half, BesselRatioEval};
pub use circular::{circular_squared_error, wrap_phase};
pub use quadrature::{integrate_positive_halfline, QuadratureSpec};
pub use rng::{sample_complex_gaussian, SeededRng};

pub(crate) use bessel::{bessel_ratio_raw, i0e_raw};

use thiserror::Error;

/// Errors from the numerical primitives.
#[derive(Debug, Error)]
pub enum NumericsError {
    /// An argument fell outside the mathematical domain of the function.
    #[error("{what} must be {requirement}, got {value}")]
    Domain {
        what: &'static str,
        requirement: &'static str,
        value: f64,
    },
    /// Adaptive quadrature exhausted its subdivision budget before reaching
    /// the requested tolerance.
    #[error("quadrature stalled at error {achieved:.3e} (requested {requested:.3e})")]
    Quadrature { achieved: f64, requested: f64 },
    /// The integrand envelope never fell below the truncation threshold, so
    /// no finite upper limit could be chosen.
    #[error("integrand envelope does not decay below the truncation threshold")]
    NoDecay,
}
