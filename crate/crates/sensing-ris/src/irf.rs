//! Interference response function: the power waveform a single-antenna
//! sensor behind one RIS element records while the user sweeps its phase.
//!
//! With the BS holding its beam fixed and the user rotating its pilot by
//! psi_l = 2 pi l / L per symbol, the sensed power is
//!
//! ```text
//! P[l] = A |alpha + beta exp(j(psi_l + phi)) + v_l|^2 + zeta_l
//! ```
//!
//! where alpha = |g_n^T w|, beta = |f_n* w_user| and phi is their phase
//! offset, v_l is circular complex receiver noise of variance sigma_v^2 and
//! zeta_l is real thermal readout noise. Two extra slots with only one
//! terminal transmitting expose alpha and beta on their own; the whole
//! protocol costs three pilot slots regardless of the element count.

use crate::channel::ChannelRealization;
use crate::numerics::{sample_complex_gaussian, wrap_phase, SeededRng};
use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use std::f64::consts::TAU;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IrfError {
    #[error("invalid sensor model: {0}")]
    InvalidSensor(&'static str),
    #[error("invalid element params: {0}")]
    InvalidParams(&'static str),
    #[error("element index {index} out of range for {count} RIS elements")]
    ElementIndex { index: usize, count: usize },
    #[error("beamformer has {got} entries, expected {expected}")]
    DimensionMismatch { got: usize, expected: usize },
}

/// Superposition parameters of one element: BS term amplitude, user term
/// amplitude and their phase offset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IrfElementParams {
    pub alpha: f64,
    pub beta: f64,
    pub phi: f64,
}

impl IrfElementParams {
    pub fn new(alpha: f64, beta: f64, phi: f64) -> Result<Self, IrfError> {
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(IrfError::InvalidParams("alpha must be finite and >= 0"));
        }
        if !(beta.is_finite() && beta >= 0.0) {
            return Err(IrfError::InvalidParams("beta must be finite and >= 0"));
        }
        if !phi.is_finite() {
            return Err(IrfError::InvalidParams("phi must be finite"));
        }
        Ok(Self {
            alpha,
            beta,
            phi: wrap_phase(phi),
        })
    }
}

/// Power sensor behind one element: amplification, receiver noise variance,
/// readout noise deviation and the sweep grid psi_l.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorModel {
    pub amplification: f64,
    pub sigma_v2: f64,
    pub sigma_zeta: f64,
    pub psi: Vec<f64>,
}

impl SensorModel {
    /// Uniform sweep psi_l = 2 pi l / L; at least three samples are needed to
    /// separate the first harmonic from its conjugate.
    pub fn uniform(l: usize, amplification: f64, sigma_v2: f64, sigma_zeta: f64) -> Result<Self, IrfError> {
        let psi = (0..l).map(|i| TAU * i as f64 / l as f64).collect();
        Self::with_phases(psi, amplification, sigma_v2, sigma_zeta)
    }

    pub fn with_phases(
        psi: Vec<f64>,
        amplification: f64,
        sigma_v2: f64,
        sigma_zeta: f64,
    ) -> Result<Self, IrfError> {
        if psi.len() < 3 {
            return Err(IrfError::InvalidSensor("need at least 3 sweep samples"));
        }
        if psi.iter().any(|p| !p.is_finite()) {
            return Err(IrfError::InvalidSensor("sweep phases must be finite"));
        }
        if !(amplification > 0.0 && amplification.is_finite()) {
            return Err(IrfError::InvalidSensor("amplification must be positive"));
        }
        if !(sigma_v2 >= 0.0 && sigma_v2.is_finite()) {
            return Err(IrfError::InvalidSensor("sigma_v2 must be finite and >= 0"));
        }
        if !(sigma_zeta >= 0.0 && sigma_zeta.is_finite()) {
            return Err(IrfError::InvalidSensor("sigma_zeta must be finite and >= 0"));
        }
        Ok(Self {
            amplification,
            sigma_v2,
            sigma_zeta,
            psi,
        })
    }

    pub fn l(&self) -> usize {
        self.psi.len()
    }
}

impl Default for SensorModel {
    fn default() -> Self {
        Self::uniform(64, 1.0, 0.1, 0.0).unwrap()
    }
}

/// Pilot convention during the sweep: BS repeats `bs_symbol`, the user
/// advances one full rotation per sweep on subcarrier `subcarrier_index` of
/// the interferential grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalingConfig {
    pub bs_symbol: Complex64,
    pub subcarrier_index: u32,
}

impl Default for SignalingConfig {
    fn default() -> Self {
        Self {
            bs_symbol: Complex64::new(1.0, 0.0),
            subcarrier_index: 1,
        }
    }
}

/// One slot of sensed powers, index-aligned with the sensor sweep grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSamples {
    pub values: Vec<f64>,
}

impl PowerSamples {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Derived per-sample moments of the sensed waveform: interference shape K,
/// mean sensing SNR, per-sample SNRs and signal powers, noise floor a and the
/// noiseless field components.
#[derive(Debug, Clone, PartialEq)]
pub struct InterferenceStats {
    /// Fringe shape K = 2 alpha beta / (alpha^2 + beta^2), in [0, 1].
    pub k: f64,
    /// Sweep-average sensing SNR, (alpha^2 + beta^2) / sigma_v^2 on a
    /// uniform grid.
    pub gamma_bar: f64,
    /// Per-sample SNR gamma_l = gamma_bar (1 + K cos(psi_l + phi)).
    pub gamma: Vec<f64>,
    /// Per-sample noiseless signal power lambda_l = a gamma_l.
    pub lambda: Vec<f64>,
    /// Amplified noise floor a = A sigma_v^2.
    pub a: f64,
    /// Real part of the noiseless field alpha + beta exp(j(psi_l + phi)).
    pub mu_r: Vec<f64>,
    /// Imaginary part of the noiseless field.
    pub mu_i: Vec<f64>,
}

/// Read (alpha, beta, phi) for element `n` off a channel realization and the
/// two beamformers.
pub fn derive_element_params(
    channel: &ChannelRealization,
    w: &DVector<Complex64>,
    w_user: Complex64,
    n: usize,
) -> Result<IrfElementParams, IrfError> {
    if n >= channel.n_ris() {
        return Err(IrfError::ElementIndex {
            index: n,
            count: channel.n_ris(),
        });
    }
    if w.len() != channel.n_bs() {
        return Err(IrfError::DimensionMismatch {
            got: w.len(),
            expected: channel.n_bs(),
        });
    }
    let bs_term = (channel.g.row(n) * w)[(0, 0)];
    let user_term = channel.f[n].conj() * w_user;
    IrfElementParams::new(
        bs_term.norm(),
        user_term.norm(),
        wrap_phase(user_term.arg() - bs_term.arg()),
    )
}

/// Moments of the sensed waveform for one element. A noiseless sensor
/// (sigma_v^2 = 0) flags the SNRs as infinite rather than failing.
pub fn derive_stats(params: &IrfElementParams, sensor: &SensorModel) -> InterferenceStats {
    let s = params.alpha * params.alpha + params.beta * params.beta;
    let k = if s > 0.0 {
        2.0 * params.alpha * params.beta / s
    } else {
        0.0
    };
    let a = sensor.amplification * sensor.sigma_v2;
    let mut gamma = Vec::with_capacity(sensor.l());
    let mut lambda = Vec::with_capacity(sensor.l());
    let mut mu_r = Vec::with_capacity(sensor.l());
    let mut mu_i = Vec::with_capacity(sensor.l());
    for &psi in &sensor.psi {
        let (sin, cos) = (psi + params.phi).sin_cos();
        mu_r.push(params.alpha + params.beta * cos);
        mu_i.push(params.beta * sin);
        let lam = (sensor.amplification * (s + 2.0 * params.alpha * params.beta * cos)).max(0.0);
        lambda.push(lam);
        gamma.push(if sensor.sigma_v2 > 0.0 {
            lam / a
        } else if lam > 0.0 {
            f64::INFINITY
        } else {
            0.0
        });
    }
    let gamma_bar = gamma.iter().sum::<f64>() / sensor.l() as f64;
    InterferenceStats {
        k,
        gamma_bar,
        gamma,
        lambda,
        a,
        mu_r,
        mu_i,
    }
}

/// Draw one phase-sweep slot of sensed powers.
pub fn generate_irf_samples(
    params: &IrfElementParams,
    sensor: &SensorModel,
    rng: &mut SeededRng,
) -> PowerSamples {
    let values = sensor
        .psi
        .iter()
        .map(|&psi| {
            let mean = Complex64::new(params.alpha, 0.0)
                + Complex64::from_polar(params.beta, psi + params.phi);
            sense(mean, sensor, rng)
        })
        .collect();
    PowerSamples { values }
}

/// Draw one amplitude slot: a single terminal transmits, so the field mean
/// stays at `amplitude` for the whole sweep.
pub fn generate_amplitude_slot(
    amplitude: f64,
    sensor: &SensorModel,
    rng: &mut SeededRng,
) -> PowerSamples {
    let mean = Complex64::new(amplitude, 0.0);
    let values = sensor.psi.iter().map(|_| sense(mean, sensor, rng)).collect();
    PowerSamples { values }
}

fn sense(mean: Complex64, sensor: &SensorModel, rng: &mut SeededRng) -> f64 {
    let field = sample_complex_gaussian(rng, mean, sensor.sigma_v2);
    let readout: f64 = rng.sample(StandardNormal);
    sensor.amplification * field.norm_sqr() + sensor.sigma_zeta * readout
}
