//! Exponentially scaled modified Bessel functions of orders zero and one.
//!
//! Likelihood terms need log I0(z) at arguments of order gamma*L, far past
//! the overflow point of the unscaled function near z = 709, so every public
//! surface here is the scaled form e^{-x} I_nu(x). Callers reconstruct
//! log I0(z) = z + ln(i0e(z)) without ever forming I0 itself.
//!
//! Power series below x = 15 (Abramowitz & Stegun 9.6.10 times e^{-x}),
//! asymptotic series with smallest-term truncation above (9.7.1). The two
//! branches agree to about 1e-14 relative at the seam.

use super::NumericsError;

const SERIES_CUTOFF: f64 = 15.0;

/// Above this argument the ratio I1/I0 switches from the quotient of scaled
/// Bessels to a four-term inverse-power tail; the branches agree to ~1e-14.
const RATIO_TAIL_CUTOFF: f64 = 500.0;

fn ie_series(nu: u32, x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = if nu == 0 { 1.0 } else { 0.5 * x };
    let mut sum = term;
    let mut k = 1.0f64;
    loop {
        term *= q / (k * (k + nu as f64));
        sum += term;
        if term <= f64::EPSILON * sum {
            break;
        }
        k += 1.0;
    }
    sum * (-x).exp()
}

fn ie_asymptotic(nu: u32, x: f64) -> f64 {
    // e^{-x} I_nu(x) ~ (2 pi x)^{-1/2} * sum_j t_j with t_0 = 1 and
    // t_j = t_{j-1} ((2j-1)^2 - 4 nu^2) / (8 j x). The series diverges, so
    // accumulation stops at the smallest term.
    let mu = 4.0 * (nu as f64) * (nu as f64);
    let mut term = 1.0f64;
    let mut sum = term;
    let mut j = 1.0f64;
    loop {
        let next = term * ((2.0 * j - 1.0).powi(2) - mu) / (8.0 * j * x);
        if next.abs() >= term.abs() {
            break;
        }
        sum += next;
        if next.abs() <= f64::EPSILON * sum.abs() {
            break;
        }
        term = next;
        j += 1.0;
    }
    sum / (2.0 * std::f64::consts::PI * x).sqrt()
}

pub(crate) fn i0e_raw(x: f64) -> f64 {
    if x < SERIES_CUTOFF {
        ie_series(0, x)
    } else {
        ie_asymptotic(0, x)
    }
}

pub(crate) fn i1e_raw(x: f64) -> f64 {
    if x < SERIES_CUTOFF {
        ie_series(1, x)
    } else {
        ie_asymptotic(1, x)
    }
}

pub(crate) fn bessel_ratio_raw(z: f64) -> f64 {
    if z <= RATIO_TAIL_CUTOFF {
        i1e_raw(z) / i0e_raw(z)
    } else {
        let r = 1.0 / z;
        1.0 - r * (0.5 + r * (0.125 + r * (0.125 + r * (25.0 / 128.0))))
    }
}

fn check_nonnegative(what: &'static str, x: f64) -> Result<(), NumericsError> {
    if !x.is_finite() || x < 0.0 {
        return Err(NumericsError::Domain {
            what,
            requirement: "finite and nonnegative",
            value: x,
        });
    }
    Ok(())
}

/// e^{-x} I0(x), finite for every finite x >= 0.
pub fn bessel_i0_scaled(x: f64) -> Result<f64, NumericsError> {
    check_nonnegative("bessel_i0_scaled argument", x)?;
    Ok(i0e_raw(x))
}

/// e^{-x} I1(x), finite for every finite x >= 0.
pub fn bessel_i1_scaled(x: f64) -> Result<f64, NumericsError> {
    check_nonnegative("bessel_i1_scaled argument", x)?;
    Ok(i1e_raw(x))
}

/// The Bessel ratio R(z) = I1(z)/I0(z), monotone from 0 towards 1.
pub fn bessel_ratio(z: f64) -> Result<f64, NumericsError> {
    check_nonnegative("bessel_ratio argument", z)?;
    Ok(bessel_ratio_raw(z))
}

/// A ratio evaluation bundled with its argument, for callers that also need
/// the derivative through the identity R'(z) = 1 - R^2(z) - R(z)/z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselRatioEval {
    pub z: f64,
    pub r: f64,
}

impl BesselRatioEval {
    pub fn eval(z: f64) -> Result<Self, NumericsError> {
        Ok(Self {
            z,
            r: bessel_ratio(z)?,
        })
    }

    /// dR/dz via the closed identity; R'(0) = 1/2 by the series limit.
    pub fn derivative(&self) -> f64 {
        if self.z == 0.0 {
            0.5
        } else {
            1.0 - self.r * self.r - self.r / self.z
        }
    }
}

/// Generalized Laguerre function of order 1/2 at nonpositive argument,
/// e^{x/2} [(1 - x) I0(-x/2) - x I1(-x/2)], evaluated through scaled Bessels
/// so it stays finite for arbitrarily negative x. It gives the mean of a
/// noncentral chi distribution with two degrees of freedom via
/// sqrt(pi/2) L_{1/2}(-m^2/2).
pub fn laguerre_half(x: f64) -> Result<f64, NumericsError> {
    if !x.is_finite() || x > 0.0 {
        return Err(NumericsError::Domain {
            what: "laguerre_half argument",
            requirement: "finite and nonpositive",
            value: x,
        });
    }
    let u = -0.5 * x;
    Ok((1.0 - x) * i0e_raw(u) - x * i1e_raw(u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    // Reference values computed with mpmath at 50 decimal digits.
    const I0E_TABLE: &[(f64, f64)] = &[
        (0.5, 0.64503527044915006811),
        (1.0, 0.46575960759364043650),
        (2.0, 0.30850832255367103953),
        (5.0, 0.18354081260932835307),
        (15.0, 0.10389953144882272143),
        (20.0, 0.089780311884826021596),
        (50.0, 0.056561626647454192530),
        (100.0, 0.039944379299096682648),
        (700.0, 0.015081295651531357587),
        (1e4, 0.0039894726746047321064),
        (1e6, 0.00039894233026924577878),
    ];

    const I1E_TABLE: &[(f64, f64)] = &[
        (0.5, 0.15642080318487169714),
        (1.0, 0.20791041534970844887),
        (2.0, 0.21526928924893765916),
        (15.0, 0.10037417504516665529),
        (700.0, 0.015070519444716846949),
        (1e6, 0.00039894213079803077631),
    ];

    const RATIO_TABLE: &[(f64, f64)] = &[
        (0.1, 0.049937603987938922190),
        (0.5, 0.24249961258080194535),
        (1.0, 0.44638996589653450705),
        (2.0, 0.69777465796400798201),
        (4.0, 0.86352261102455058285),
        (10.0, 0.94859982595484595897),
        (50.0, 0.98994896737849775259),
        (100.0, 0.99498737300516876559),
        (500.0, 0.99899949899686193252),
        (1e3, 0.99949987487480428020),
        (1e6, 0.99999949999987499987),
    ];

    const LAGUERRE_TABLE: &[(f64, f64)] = &[
        (0.0, 1.0),
        (-0.5, 1.2355820575582631692),
        (-1.0, 1.4464913440831718334),
        (-2.0, 1.8130996534803382072),
        (-5.0, 2.6532018973295492084),
        (-12.5, 4.0700647089310047771),
        (-50.0, 8.0188411168839107309),
        (-5000.0, 79.792445602841085028),
    ];

    #[test]
    fn i0_scaled_matches_reference() {
        assert_eq!(bessel_i0_scaled(0.0).unwrap(), 1.0);
        for &(x, expect) in I0E_TABLE {
            assert_relative_eq!(bessel_i0_scaled(x).unwrap(), expect, max_relative = 1e-13);
        }
    }

    #[test]
    fn i1_scaled_matches_reference() {
        assert_eq!(bessel_i1_scaled(0.0).unwrap(), 0.0);
        for &(x, expect) in I1E_TABLE {
            assert_relative_eq!(bessel_i1_scaled(x).unwrap(), expect, max_relative = 1e-13);
        }
    }

    #[test]
    fn i1_scaled_large_argument_asymptote() {
        // e^{-x} I1(x) -> 1/sqrt(2 pi x); within 1% at x = 1000.
        let x = 1000.0;
        let asym = 1.0 / (2.0 * std::f64::consts::PI * x).sqrt();
        let v = bessel_i1_scaled(x).unwrap();
        assert!((v - asym).abs() / asym < 0.01);
    }

    #[test]
    fn ratio_matches_reference() {
        assert_eq!(bessel_ratio(0.0).unwrap(), 0.0);
        for &(z, expect) in RATIO_TABLE {
            assert_relative_eq!(bessel_ratio(z).unwrap(), expect, max_relative = 1e-12);
        }
    }

    #[test]
    fn ratio_tail_agrees_at_seam() {
        let below = i1e_raw(RATIO_TAIL_CUTOFF) / i0e_raw(RATIO_TAIL_CUTOFF);
        let above = bessel_ratio_raw(RATIO_TAIL_CUTOFF + 1e-9);
        assert_relative_eq!(below, above, max_relative = 1e-12);
    }

    #[test]
    fn ratio_near_one_at_huge_argument() {
        let z = 1e6;
        let v = bessel_ratio(z).unwrap();
        assert!((v - (1.0 - 1.0 / (2.0 * z))).abs() < 1e-9);
    }

    #[test]
    fn series_and_asymptotic_branches_meet() {
        for nu in [0, 1] {
            let series = ie_series(nu, SERIES_CUTOFF);
            let asym = ie_asymptotic(nu, SERIES_CUTOFF);
            assert_relative_eq!(series, asym, max_relative = 1e-12);
        }
    }

    #[test]
    fn laguerre_matches_reference() {
        for &(x, expect) in LAGUERRE_TABLE {
            assert_relative_eq!(laguerre_half(x).unwrap(), expect, max_relative = 1e-12);
        }
    }

    #[test]
    fn ratio_derivative_identity_spot_check() {
        for z in [0.3, 1.0, 7.0, 40.0, 300.0] {
            let e = BesselRatioEval::eval(z).unwrap();
            let h = 1e-6 * z.max(1.0);
            let fd = (bessel_ratio_raw(z + h) - bessel_ratio_raw(z - h)) / (2.0 * h);
            assert_relative_eq!(e.derivative(), fd, max_relative = 1e-6, epsilon = 1e-9);
        }
    }

    #[test]
    fn domain_errors() {
        assert!(bessel_i0_scaled(-1.0).is_err());
        assert!(bessel_i0_scaled(f64::NAN).is_err());
        assert!(bessel_i1_scaled(f64::INFINITY).is_err());
        assert!(bessel_ratio(-0.1).is_err());
        assert!(laguerre_half(0.5).is_err());
    }

    proptest! {
        #[test]
        fn scaled_outputs_finite_positive(x in 0.0f64..1e8) {
            let v0 = bessel_i0_scaled(x).unwrap();
            prop_assert!(v0.is_finite() && v0 > 0.0);
            let v1 = bessel_i1_scaled(x).unwrap();
            prop_assert!(v1.is_finite() && v1 >= 0.0);
        }

        #[test]
        fn ratio_in_unit_interval_and_monotone(a in 1e-6f64..1e6, b in 1e-6f64..1e6) {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let rl = bessel_ratio(lo).unwrap();
            let rh = bessel_ratio(hi).unwrap();
            prop_assert!((0.0..1.0).contains(&rl));
            prop_assert!((0.0..1.0).contains(&rh));
            prop_assert!(rl <= rh + 1e-14);
        }
    }
}
