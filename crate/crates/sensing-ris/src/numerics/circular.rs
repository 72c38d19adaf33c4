//! Circular arithmetic on phases.

use std::f64::consts::{PI, TAU};

/// Reduce an angle to the half-open interval (-pi, pi].
pub fn wrap_phase(x: f64) -> f64 {
    let y = x.rem_euclid(TAU);
    if y > PI {
        y - TAU
    } else {
        y
    }
}

/// Squared shortest-arc distance between two angles, bounded by pi^2.
pub fn circular_squared_error(est: f64, truth: f64) -> f64 {
    let d = wrap_phase(est - truth);
    d * d
}
