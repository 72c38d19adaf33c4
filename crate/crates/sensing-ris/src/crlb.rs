//! Cramer-Rao lower bound of the sweep phase estimate.
//!
//! The bound depends on the element only through the fringe contrast K and
//! the mean sensing SNR gamma_bar: the Fisher information of one sweep is
//!
//! ```text
//! 1/CRLB = K^2 gamma_bar^2 sum_l sin^2(psi_l + phi) (1/gamma_l - g(gamma_l))
//! ```
//!
//! with gamma_l = gamma_bar (1 + K cos(psi_l + phi)). The per-sample loss
//! g(gamma) is an integral over the Rice density; `g_exact` evaluates it by
//! adaptive quadrature in an overflow-safe form and `g_hat` by a closed-form
//! large-gamma approximation whose relative error on the information terms
//! is bounded by `asymptotic_error_bound`.

use crate::numerics::{
    bessel_i0_scaled, bessel_i1_scaled, bessel_ratio_raw, i0e_raw, integrate_positive_halfline,
    NumericsError, QuadratureSpec,
};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CrlbError {
    #[error("invalid query: {0}")]
    InvalidQuery(&'static str),
    #[error("sample {l} has zero SNR but nonzero weight; information undefined")]
    DegenerateTerm { l: usize },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// A bound query: contrast, mean SNR, true phase and the sweep grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CrlbQuery {
    pub k: f64,
    pub gamma_bar: f64,
    pub phi: f64,
    pub psi: Vec<f64>,
}

impl CrlbQuery {
    /// Query on the uniform grid psi_l = 2 pi l / L.
    pub fn uniform(k: f64, gamma_bar: f64, phi: f64, l: usize) -> Self {
        Self {
            k,
            gamma_bar,
            phi,
            psi: (0..l).map(|i| 2.0 * PI * i as f64 / l as f64).collect(),
        }
    }

    pub fn validate(&self) -> Result<(), CrlbError> {
        if !(self.k.is_finite() && self.k.abs() <= 1.0) {
            return Err(CrlbError::InvalidQuery("contrast K must lie in [-1, 1]"));
        }
        if !(self.gamma_bar > 0.0 && self.gamma_bar.is_finite()) {
            return Err(CrlbError::InvalidQuery("gamma_bar must be positive"));
        }
        if !self.phi.is_finite() {
            return Err(CrlbError::InvalidQuery("phi must be finite"));
        }
        if self.psi.len() < 3 || self.psi.iter().any(|p| !p.is_finite()) {
            return Err(CrlbError::InvalidQuery("need at least 3 finite sweep phases"));
        }
        Ok(())
    }
}

/// Per-sample information loss g(gamma): the expectation of the squared
/// Rice score, integrated in the substitution that keeps every factor
/// bounded: gamma t exp(-gamma (1 - sqrt t)^2) i0e(2 gamma sqrt t)
/// (1 - R^2(2 gamma sqrt t)) over t in [0, inf).
pub fn g_exact(gamma: f64, spec: &QuadratureSpec) -> Result<f64, CrlbError> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(CrlbError::InvalidQuery("gamma must be positive"));
    }
    let f = move |t: f64| {
        if t <= 0.0 {
            return 0.0;
        }
        let rt = t.sqrt();
        let z = 2.0 * gamma * rt;
        let r = bessel_ratio_raw(z);
        gamma * t * (-gamma * (1.0 - rt) * (1.0 - rt)).exp() * i0e_raw(z) * (1.0 - r * r)
    };
    Ok(integrate_positive_halfline(f, spec)?)
}

/// Closed-form large-gamma approximation of g: (1/4) sqrt(pi/gamma)
/// [(1 + 1/gamma) i0e(gamma/2) + i1e(gamma/2)]; the exp(-gamma/2) of the
/// printed form cancels against the Bessel scaling.
pub fn g_hat(gamma: f64) -> Result<f64, CrlbError> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(CrlbError::InvalidQuery("gamma must be positive"));
    }
    let half = 0.5 * gamma;
    let i0 = bessel_i0_scaled(half)?;
    let i1 = bessel_i1_scaled(half)?;
    Ok(0.25 * (PI / gamma).sqrt() * ((1.0 + 1.0 / gamma) * i0 + i1))
}

fn information<G>(q: &CrlbQuery, mut g: G) -> Result<f64, CrlbError>
where
    G: FnMut(f64) -> Result<f64, CrlbError>,
{
    q.validate()?;
    if q.k == 0.0 {
        return Ok(0.0);
    }
    let mut info = 0.0;
    for (l, &psi) in q.psi.iter().enumerate() {
        let (sin, cos) = (psi + q.phi).sin_cos();
        let s2 = sin * sin;
        let gl = (q.gamma_bar * (1.0 + q.k * cos)).max(0.0);
        if gl < 1e-8 && s2 <= 1e-12 {
            // 0 * inf tie-break: a vanishing-SNR sample only occurs where
            // its sin^2 weight vanishes too
            continue;
        }
        if gl == 0.0 {
            return Err(CrlbError::DegenerateTerm { l });
        }
        info += s2 * (1.0 / gl - g(gl)?).max(0.0);
    }
    Ok(q.k * q.k * q.gamma_bar * q.gamma_bar * info)
}

/// Exact bound; +infinity when K = 0 (the phase is unidentifiable).
pub fn crlb_exact(q: &CrlbQuery, spec: &QuadratureSpec) -> Result<f64, CrlbError> {
    let info = information(q, |gl| g_exact(gl, spec))?;
    Ok(if info > 0.0 { 1.0 / info } else { f64::INFINITY })
}

/// Asymptotic bound: g replaced by g_hat, each information term clamped to
/// be nonnegative; +infinity when K = 0.
pub fn crlb_asymptotic(q: &CrlbQuery) -> Result<f64, CrlbError> {
    let info = information(q, g_hat)?;
    Ok(if info > 0.0 { 1.0 / info } else { f64::INFINITY })
}

/// Upper bound on the relative error of the asymptotic information terms,
/// 0.07 / (gamma/6 - 0.07), valid for gamma > 0.42.
pub fn asymptotic_error_bound(gamma: f64) -> Result<f64, CrlbError> {
    if !(gamma > 0.42) {
        return Err(CrlbError::InvalidQuery(
            "error bound holds only for gamma > 0.42",
        ));
    }
    Ok(0.07 / (gamma / 6.0 - 0.07))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{laguerre_half, sample_complex_gaussian, SeededRng};
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use num_complex::Complex64;

    // high-precision quadrature of the g integral
    const G_EXACT_TABLE: [(f64, f64); 13] = [
        (0.1, 9.1616406217079226),
        (0.42, 1.81735881180571244),
        (0.5, 1.47855307926561886),
        (1.0, 0.645575696331745676),
        (2.0, 0.28684198703911508),
        (5.0, 0.105335630650730147),
        (10.0, 0.0512852073388048615),
        (20.0, 0.0253166221971449349),
        (38.0, 0.0132450450987421744),
        (50.0, 0.0100502551917364199),
        (100.0, 0.00501253156832162232),
        (1000.0, 0.000500125031281306793),
        (10000.0, 5.00012500312531256e-5),
    ];

    // high-precision evaluation of the closed form
    const G_HAT_TABLE: [(f64, f64); 7] = [
        (0.1, 14.704487858439893519),
        (1.0, 0.64095978828042843292),
        (5.0, 0.10515507505746263353),
        (10.0, 0.051267055568385557941),
        (20.0, 0.025314532944299921674),
        (100.0, 0.0050125157440649986979),
        (1000.0, 0.00050012501563673710556),
    ];

    #[test]
    fn g_exact_matches_reference() {
        let spec = QuadratureSpec::default();
        for (gamma, want) in G_EXACT_TABLE {
            let got = g_exact(gamma, &spec).unwrap();
            assert_relative_eq!(got, want, max_relative = 1e-9);
        }
    }

    #[test]
    fn g_hat_matches_reference() {
        for (gamma, want) in G_HAT_TABLE {
            assert_relative_eq!(g_hat(gamma).unwrap(), want, max_relative = 1e-12);
        }
    }

    #[test]
    fn information_terms_positive() {
        let spec = QuadratureSpec::default();
        for (gamma, _) in G_EXACT_TABLE {
            let g = g_exact(gamma, &spec).unwrap();
            assert!(1.0 / gamma - g > 0.0, "no information at gamma {gamma}");
        }
    }

    #[test]
    fn g_hat_expansion_tail() {
        // 2 gamma g_hat -> 1 + 1/(4 gamma) + O(1/gamma^2)
        let gamma = 1e4;
        let val = 2.0 * gamma * g_hat(gamma).unwrap();
        assert!((val - 1.0 - 1.0 / (4.0 * gamma)).abs() < 1e-6);
    }

    #[test]
    fn g_hat_exceeds_inverse_gamma_at_small_gamma() {
        // below gamma ~ 1 the approximation overshoots 1/gamma, which is
        // why the asymptotic information terms carry a (.)+ clamp
        assert!(g_hat(0.1).unwrap() > 10.0);
        let q = CrlbQuery::uniform(0.9, 0.2, 0.3, 16);
        let bound = crlb_asymptotic(&q).unwrap();
        assert!(bound.is_finite() && bound > 0.0);
    }

    #[test]
    fn error_bound_examples_and_domain() {
        assert_relative_eq!(
            asymptotic_error_bound(6.0).unwrap(),
            0.07 / 0.93,
            max_relative = 1e-15
        );
        assert!(asymptotic_error_bound(0.42).is_err());
        assert!(asymptotic_error_bound(0.1).is_err());
    }

    #[test]
    fn approximation_error_within_bound_on_grid() {
        let spec = QuadratureSpec::default();
        for i in 0..40 {
            let gamma = 10f64.powf(2.0 * i as f64 / 39.0); // 1 .. 100
            let exact = g_exact(gamma, &spec).unwrap();
            let approx = g_hat(gamma).unwrap();
            let rel = (approx - exact).abs() / (1.0 / gamma - exact);
            let bound = asymptotic_error_bound(gamma).unwrap();
            assert!(rel <= bound, "gamma {gamma}: rel {rel} > bound {bound}");
        }
    }

    #[test]
    fn delta_deviation_peaks_below_007() {
        // the bound rests on |x (1 - R^2(2 sqrt x)) - sqrt(x)/2| <= 0.07
        let mut max_dev: f64 = 0.0;
        for i in 0..=5000 {
            let x = i as f64 * 1e-3;
            let r = bessel_ratio_raw(2.0 * x.sqrt());
            let dev = (x * (1.0 - r * r) - 0.5 * x.sqrt()).abs();
            max_dev = max_dev.max(dev);
        }
        assert!(max_dev <= 0.07, "max deviation {max_dev}");
        // the constant is nearly tight
        assert!(max_dev > 0.067, "max deviation {max_dev}");
    }

    #[test]
    fn zero_contrast_bound_is_infinite() {
        let spec = QuadratureSpec::default();
        let q = CrlbQuery::uniform(0.0, 20.0, 0.4, 64);
        assert!(crlb_exact(&q, &spec).unwrap().is_infinite());
        assert!(crlb_asymptotic(&q).unwrap().is_infinite());
    }

    #[test]
    fn full_contrast_drops_vanishing_sample() {
        // K = 1 with phi = 0 puts one sweep sample at zero SNR, but its
        // sin^2 weight vanishes there as well
        let spec = QuadratureSpec::default();
        let q = CrlbQuery::uniform(1.0, 10.0, 0.0, 4);
        let bound = crlb_exact(&q, &spec).unwrap();
        assert!(bound.is_finite() && bound > 0.0);
    }

    #[test]
    fn invalid_queries_rejected() {
        let spec = QuadratureSpec::default();
        let q = CrlbQuery::uniform(1.5, 10.0, 0.0, 8);
        assert!(crlb_exact(&q, &spec).is_err());
        let q = CrlbQuery::uniform(0.5, -1.0, 0.0, 8);
        assert!(crlb_asymptotic(&q).is_err());
        assert!(g_exact(0.0, &spec).is_err());
        assert!(g_hat(-2.0).is_err());
    }

    #[test]
    fn exact_bound_matches_score_variance() {
        // independent check: 1/CRLB equals the variance of the likelihood
        // score at the true phase
        use crate::estimators::ml_derivatives;
        use crate::irf::{generate_irf_samples, IrfElementParams, SensorModel};
        let (k, gamma_bar, phi) = (0.6, 20.0, 0.9);
        let s = 2.0f64;
        let hi = (s + k * s).sqrt();
        let lo = (s - k * s).sqrt();
        let (alpha, beta) = ((hi + lo) / 2.0, (hi - lo) / 2.0);
        let sensor = SensorModel::uniform(64, 1.0, s / gamma_bar, 0.0).unwrap();
        let params = IrfElementParams::new(alpha, beta, phi).unwrap();
        let mut rng = SeededRng::new(53);
        let trials = 100_000;
        let (mut sum, mut sum_sq) = (0.0, 0.0);
        for _ in 0..trials {
            let samples = generate_irf_samples(&params, &sensor, &mut rng);
            let score = ml_derivatives(phi, &samples, alpha, beta, &sensor).d1;
            let sq = score * score;
            sum += sq;
            sum_sq += sq * sq;
        }
        let n = trials as f64;
        let mean = sum / n;
        let se = ((sum_sq / n - mean * mean) / n).sqrt();
        let q = CrlbQuery::uniform(k, gamma_bar, phi, 64);
        let info = 1.0 / crlb_exact(&q, &QuadratureSpec::default()).unwrap();
        assert_abs_diff_eq!(mean, info, epsilon = 3.0 * se);
    }

    #[test]
    fn bound_insensitive_to_phase() {
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for i in 0..32 {
            let phi = 2.0 * PI * i as f64 / 32.0;
            let q = CrlbQuery::uniform(0.9, 20.0, phi, 64);
            let info = 1.0 / crlb_asymptotic(&q).unwrap();
            lo = lo.min(info);
            hi = hi.max(info);
        }
        assert!(hi / lo < 1.01, "ratio {}", hi / lo);
    }

    #[test]
    fn information_monotone_in_snr_and_contrast() {
        let spec = QuadratureSpec::default();
        let n = 20;
        let mut info = vec![vec![0.0f64; n]; n];
        for (i, row) in info.iter_mut().enumerate() {
            let k = 0.05 + 0.95 * i as f64 / (n - 1) as f64;
            for (j, cell) in row.iter_mut().enumerate() {
                let gamma_bar = 5.0 * 100f64.powf(j as f64 / (n - 1) as f64);
                let q = CrlbQuery::uniform(k, gamma_bar, 0.35, 16);
                *cell = 1.0 / crlb_exact(&q, &spec).unwrap();
            }
        }
        for i in 0..n {
            for j in 1..n {
                assert!(
                    info[i][j] >= info[i][j - 1] * (1.0 - 1e-9),
                    "not monotone in gamma_bar at ({i}, {j})"
                );
            }
        }
        for j in 0..n {
            for i in 1..n {
                assert!(
                    info[i][j] >= info[i - 1][j] * (1.0 - 1e-9),
                    "not monotone in K at ({i}, {j})"
                );
            }
        }
    }

    #[test]
    fn asymptotic_close_to_exact_at_high_snr() {
        let spec = QuadratureSpec::default();
        for (k, gamma_bar) in [(0.5, 40.0), (0.2, 25.0), (0.9, 200.0)] {
            let q = CrlbQuery::uniform(k, gamma_bar, 1.1, 64);
            let exact = crlb_exact(&q, &spec).unwrap();
            let approx = crlb_asymptotic(&q).unwrap();
            assert_relative_eq!(approx, exact, max_relative = 0.02);
        }
    }

    #[test]
    fn noncentral_chi_mean_identity() {
        // E |CN(m, 2)| = sqrt(pi/2) L_{1/2}(-m^2/2); fixes the Laguerre
        // helper against an independent sampler
        let m = 2.0;
        let want = (PI / 2.0).sqrt() * laguerre_half(-0.5 * m * m).unwrap();
        assert_relative_eq!(want, 2.2723834280687425228, max_relative = 1e-12);
        let mut rng = SeededRng::new(59);
        let trials = 1_000_000;
        let (mut sum, mut sum_sq) = (0.0, 0.0);
        for _ in 0..trials {
            let z = sample_complex_gaussian(&mut rng, Complex64::new(m, 0.0), 2.0);
            let r = z.norm();
            sum += r;
            sum_sq += r * r;
        }
        let n = trials as f64;
        let mean = sum / n;
        let se = ((sum_sq / n - mean * mean) / n).sqrt();
        assert_abs_diff_eq!(mean, want, epsilon = 3.0 * se);
    }
}
