//! Phase and amplitude estimation from sensed power sweeps.
//!
//! Three estimators recover the phase offset phi of one element from its
//! power waveform: the first-harmonic DFT (closed form, coarse), a
//! safeguarded Newton ascent of the exact noncentral chi-squared
//! log-likelihood, and a von Mises EM scheme that alternates latent-phase
//! inference with a conjugate Bayesian update of the phase posterior. The
//! amplitudes alpha and beta come from the two single-terminal slots by a
//! method-of-moments inverse.
//!
//! All likelihood Bessel terms run through the exponentially scaled forms,
//! so the code stays finite for samples as large as z ~ 4 gamma L.

use crate::irf::{IrfElementParams, PowerSamples, SensorModel};
use crate::numerics::{bessel_ratio_raw, i0e_raw, wrap_phase};
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, TAU};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EstimatorError {
    #[error("phase undefined: all power samples are zero")]
    UndefinedPhase,
    #[error("need at least 3 samples, got {got}")]
    TooFewSamples { got: usize },
}

/// Which estimator produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Dft,
    NewtonMl,
    VmEm,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Dft => "dft",
            Method::NewtonMl => "newton_ml",
            Method::VmEm => "vm_em",
        })
    }
}

/// A phase estimate with its iteration budget accounting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimationResult {
    /// Wrapped estimate in (-pi, pi].
    pub phi_hat: f64,
    /// Parameter updates actually applied.
    pub iterations: usize,
    pub converged: bool,
    pub method: Method,
}

/// Von Mises distribution VM(mu, kappa) in natural-parameter form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VonMisesParams {
    pub mu: f64,
    pub kappa: f64,
}

impl VonMisesParams {
    pub fn natural(&self) -> Complex64 {
        Complex64::from_polar(self.kappa, self.mu)
    }
}

/// One EM pass over the sweep: latent magnitudes, inferred latent phases,
/// recentered phasors and the resulting posterior natural parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct VmEmState {
    /// s_l = sqrt(max(P[l], 0) / A).
    pub s: Vec<f64>,
    /// Latent field phases theta_l from the E-step.
    pub theta: Vec<f64>,
    /// Recentered phasors w_l = s_l exp(j theta_l) - alpha.
    pub w: Vec<Complex64>,
    /// Posterior natural parameter z_phi = kappa exp(j phi) + 2 beta
    /// (sum_l w_l exp(-j psi_l)) / sigma_v^2.
    pub z_phi: Complex64,
}

/// Log-likelihood derivatives at one phase, with the Rice arguments z_l.
#[derive(Debug, Clone, PartialEq)]
pub struct NewtonState {
    /// z_l = 2 sqrt(P[l] lambda_l) / (A sigma_v^2).
    pub z: Vec<f64>,
    /// First derivative of the log-likelihood.
    pub d1: f64,
    /// Second derivative of the log-likelihood.
    pub d2: f64,
}

/// Method-of-moments amplitude from a single-terminal slot:
/// sqrt(max(mean(P)/A - sigma_v^2, 0)).
pub fn estimate_amplitude(slot: &PowerSamples, sensor: &SensorModel) -> f64 {
    if slot.is_empty() {
        return 0.0;
    }
    let mean = slot.values.iter().sum::<f64>() / slot.len() as f64;
    (mean / sensor.amplification - sensor.sigma_v2).max(0.0).sqrt()
}

/// Phase of the first DFT harmonic of the sweep, exact in the noiseless
/// case for any L >= 3.
pub fn dft_phase(samples: &PowerSamples) -> Result<EstimationResult, EstimatorError> {
    let l = samples.len();
    if l < 3 {
        return Err(EstimatorError::TooFewSamples { got: l });
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, &p) in samples.values.iter().enumerate() {
        acc += p * Complex64::from_polar(1.0, -TAU * i as f64 / l as f64);
    }
    if acc.norm() == 0.0 {
        return Err(EstimatorError::UndefinedPhase);
    }
    Ok(EstimationResult {
        phi_hat: acc.arg(),
        iterations: 0,
        converged: true,
        method: Method::Dft,
    })
}

/// Log-likelihood of the phase given one sweep, amplitudes taken from
/// `params` (its phi field is ignored; `phi` is the evaluation point).
/// Meaningful only for sigma_v^2 > 0.
pub fn ml_log_likelihood(
    phi: f64,
    samples: &PowerSamples,
    params: &IrfElementParams,
    sensor: &SensorModel,
) -> f64 {
    let amp = sensor.amplification;
    let a = amp * sensor.sigma_v2;
    let s2 = params.alpha * params.alpha + params.beta * params.beta;
    let cross = 2.0 * params.alpha * params.beta;
    let mut total = 0.0;
    for (i, &psi) in sensor.psi.iter().enumerate() {
        let pc = samples.values[i].max(0.0);
        let lam = (amp * (s2 + cross * (psi + phi).cos())).max(0.0);
        let z = 2.0 * (pc * lam).sqrt() / a;
        // log I0(z) = z + log i0e(z)
        total += -(pc + lam) / a + z + i0e_raw(z).ln();
    }
    total - sensor.l() as f64 * a.ln()
}

/// First and second derivatives of the log-likelihood at `phi`.
pub fn ml_derivatives(
    phi: f64,
    samples: &PowerSamples,
    alpha: f64,
    beta: f64,
    sensor: &SensorModel,
) -> NewtonState {
    let amp = sensor.amplification;
    let a = amp * sensor.sigma_v2;
    let s2 = alpha * alpha + beta * beta;
    let cross = 2.0 * alpha * beta;
    let coef = cross / sensor.sigma_v2;
    let mut z_all = Vec::with_capacity(sensor.l());
    let mut sum1 = 0.0;
    let mut sum_c = 0.0;
    let mut sum_s = 0.0;
    for (i, &psi) in sensor.psi.iter().enumerate() {
        let pc = samples.values[i].max(0.0);
        let (sin, cos) = (psi + phi).sin_cos();
        let lam = (amp * (s2 + cross * cos)).max(0.0);
        let z = 2.0 * (pc * lam).sqrt() / a;
        z_all.push(z);
        let r = bessel_ratio_raw(z);
        let p_over_lam = if lam > 0.0 { pc / lam.max(1e-300) } else { 0.0 };
        let held = 1.0 - r * p_over_lam.sqrt();
        sum1 += sin * held;
        sum_c += cos * held;
        // (1 - R^2 - 2R/z) -> 0 as z -> 0 since R/z -> 1/2
        let curv = if z > 0.0 { 1.0 - r * r - 2.0 * r / z } else { 0.0 };
        sum_s += sin * sin * curv * p_over_lam;
    }
    NewtonState {
        z: z_all,
        d1: coef * sum1,
        d2: coef * sum_c + coef * coef * sum_s,
    }
}

/// Safeguarded Newton ascent of the log-likelihood, `max_iters` steps
/// (default contract is 4) from `init`. Steps larger than pi/2 or taken
/// against the curvature are halved until the likelihood improves; if no
/// halving helps the iterate stays put. `converged` reports whether the
/// final step was an unguarded Newton step or negligibly small.
pub fn newton_ml_phase(
    samples: &PowerSamples,
    alpha: f64,
    beta: f64,
    sensor: &SensorModel,
    init: f64,
    max_iters: usize,
) -> EstimationResult {
    let mut phi = wrap_phase(init);
    let result = |phi_hat, iterations, converged| EstimationResult {
        phi_hat,
        iterations,
        converged,
        method: Method::NewtonMl,
    };
    if alpha * beta == 0.0 {
        return result(phi, 0, false);
    }
    let params = IrfElementParams { alpha, beta, phi: 0.0 };
    let mut iterations = 0;
    let mut converged = false;
    for _ in 0..max_iters {
        let state = ml_derivatives(phi, samples, alpha, beta, sensor);
        if !state.d1.is_finite() || !state.d2.is_finite() {
            return result(wrap_phase(init), iterations, false);
        }
        if state.d2 == 0.0 {
            converged = false;
            break;
        }
        let mut step = -state.d1 / state.d2;
        if step.abs() > FRAC_PI_2 || state.d2 >= 0.0 {
            let l0 = ml_log_likelihood(phi, samples, &params, sensor);
            let mut improved = false;
            for _ in 0..8 {
                step *= 0.5;
                let cand = wrap_phase(phi + step);
                if ml_log_likelihood(cand, samples, &params, sensor) > l0 {
                    phi = cand;
                    improved = true;
                    break;
                }
            }
            if !improved {
                converged = false;
                break;
            }
            iterations += 1;
            converged = step.abs() < 1e-8;
        } else {
            phi = wrap_phase(phi + step);
            iterations += 1;
            converged = true;
        }
    }
    result(phi, iterations, converged)
}

/// One von Mises EM pass at the current (phi, kappa) posterior.
pub fn vm_em_step(
    phi: f64,
    kappa: f64,
    samples: &PowerSamples,
    alpha: f64,
    beta: f64,
    sensor: &SensorModel,
) -> VmEmState {
    let l = sensor.l();
    let mut s = Vec::with_capacity(l);
    let mut theta = Vec::with_capacity(l);
    let mut w = Vec::with_capacity(l);
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, &psi) in sensor.psi.iter().enumerate() {
        let sl = (samples.values[i].max(0.0) / sensor.amplification).sqrt();
        let mean = Complex64::new(alpha, 0.0) + Complex64::from_polar(beta, phi + psi);
        let th = mean.arg();
        let wl = Complex64::from_polar(sl, th) - alpha;
        acc += wl * Complex64::from_polar(1.0, -psi);
        s.push(sl);
        theta.push(th);
        w.push(wl);
    }
    let posterior = vm_posterior_update(
        &VonMisesParams { mu: phi, kappa },
        beta * acc,
        sensor.sigma_v2,
    );
    VmEmState {
        s,
        theta,
        w,
        z_phi: posterior.natural(),
    }
}

/// Von Mises EM phase estimation: DFT initialization with kappa = 1, then
/// up to `max_iters` EM passes (default contract is 4), stopping early once
/// the update moves less than 1e-6.
pub fn vm_em_phase(
    samples: &PowerSamples,
    alpha: f64,
    beta: f64,
    sensor: &SensorModel,
    max_iters: usize,
) -> EstimationResult {
    let init = dft_phase(samples).map(|r| r.phi_hat).unwrap_or(0.0);
    let result = |phi_hat, iterations, converged| EstimationResult {
        phi_hat,
        iterations,
        converged,
        method: Method::VmEm,
    };
    if alpha * beta == 0.0 {
        return result(init, 0, false);
    }
    let mut phi = init;
    let mut kappa = 1.0;
    let mut iterations = 0;
    let mut converged = true;
    for _ in 0..max_iters {
        let state = vm_em_step(phi, kappa, samples, alpha, beta, sensor);
        if state.z_phi.norm() == 0.0 {
            converged = false;
            break;
        }
        let next = state.z_phi.arg();
        kappa = state.z_phi.norm();
        let delta = wrap_phase(next - phi);
        phi = next;
        iterations += 1;
        if delta.abs() < 1e-6 {
            break;
        }
    }
    result(wrap_phase(phi), iterations, converged)
}

/// Conjugate Bayesian update of a von Mises phase prior from one complex
/// observation of variance sigma^2: the natural parameter gains 2z/sigma^2.
pub fn vm_posterior_update(
    prior: &VonMisesParams,
    z: Complex64,
    variance: f64,
) -> VonMisesParams {
    let c = prior.natural() + 2.0 * z / variance;
    if c.norm() == 0.0 {
        return VonMisesParams {
            mu: prior.mu,
            kappa: 0.0,
        };
    }
    VonMisesParams {
        mu: c.arg(),
        kappa: c.norm(),
    }
}
