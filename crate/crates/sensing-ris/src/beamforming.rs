//! RIS phase configuration and scoring: the sensed-phase design rule, the
//! perfect-CSI oracle, least-squares cascade estimation with DFT pilot
//! configurations, an alternating-ascent refinement, and SNR / spectral
//! efficiency metrics.
//!
//! The downlink score is SNR = |f^H diag(theta) G w|^2 / sigma_z^2, which
//! collapses to |theta^T H w|^2 / sigma_z^2 with the cascade H = diag(f*) G.
//! Only the N phases theta_n are adjustable; all design rules differ only
//! in what channel knowledge they assume.

use crate::channel::ChannelRealization;
use crate::numerics::{sample_complex_gaussian, SeededRng};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use std::f64::consts::{PI, TAU};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BeamformingError {
    #[error("dimension mismatch: got {got}, expected {expected}")]
    DimensionMismatch { got: usize, expected: usize },
    #[error("invalid pilot setup: {0}")]
    InvalidPilots(&'static str),
    #[error("invalid power budget: {0}")]
    InvalidPower(&'static str),
}

/// Transmit-side resources: BS precoder, user pilot symbol and their power
/// budgets in watts.
#[derive(Debug, Clone, PartialEq)]
pub struct Beamformers {
    pub w: DVector<Complex64>,
    pub w_user: Complex64,
    pub p_max: f64,
    pub p_user_max: f64,
}

impl Beamformers {
    pub fn validate(&self) -> Result<(), BeamformingError> {
        if !(self.p_max > 0.0 && self.p_user_max > 0.0) {
            return Err(BeamformingError::InvalidPower("power budgets must be positive"));
        }
        if self.w.norm_squared() > self.p_max + 1e-12 {
            return Err(BeamformingError::InvalidPower("BS precoder exceeds P_max"));
        }
        if self.w_user.norm_sqr() > self.p_user_max + 1e-12 {
            return Err(BeamformingError::InvalidPower("user symbol exceeds P'_max"));
        }
        Ok(())
    }
}

/// Unit-modulus RIS phase configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseConfig {
    pub theta: DVector<Complex64>,
}

impl PhaseConfig {
    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }
}

/// Receiver noise budget: user-side sigma_z^2 = BW x n0 and BS-side pilot
/// noise sigma_n^2, both in watts, plus the raw quantities they derive from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub sigma_z2: f64,
    pub sigma_n2: f64,
    /// Noise power density in dBm/Hz.
    pub noise_density_dbm_hz: f64,
    pub bandwidth_hz: f64,
    /// Power-sensor noise figure in dB.
    pub sensor_noise_figure_db: f64,
}

impl LinkBudget {
    /// Budget derived from density, bandwidth and sensor figure; the pilot
    /// receiver shares the user link budget.
    pub fn from_noise(noise_density_dbm_hz: f64, bandwidth_hz: f64, sensor_noise_figure_db: f64) -> Self {
        let n0_watts = 10f64.powf(noise_density_dbm_hz / 10.0) * 1e-3;
        let sigma_z2 = bandwidth_hz * n0_watts;
        Self {
            sigma_z2,
            sigma_n2: sigma_z2,
            noise_density_dbm_hz,
            bandwidth_hz,
            sensor_noise_figure_db,
        }
    }

    /// Sensing noise variance over the 100 MHz sensor front end,
    /// sigma_v^2 = 100 MHz x n0 x F_p.
    pub fn sensor_noise_variance(&self) -> f64 {
        let n0_watts = 10f64.powf(self.noise_density_dbm_hz / 10.0) * 1e-3;
        1e8 * n0_watts * 10f64.powf(self.sensor_noise_figure_db / 10.0)
    }

    pub fn validate(&self) -> Result<(), BeamformingError> {
        let want = self.bandwidth_hz * 10f64.powf(self.noise_density_dbm_hz / 10.0) * 1e-3;
        if !(self.sigma_z2 > 0.0) || (self.sigma_z2 - want).abs() > 1e-9 * want {
            return Err(BeamformingError::InvalidPower(
                "sigma_z2 inconsistent with bandwidth x noise density",
            ));
        }
        if !(self.sigma_n2 > 0.0) {
            return Err(BeamformingError::InvalidPower("sigma_n2 must be positive"));
        }
        Ok(())
    }
}

impl Default for LinkBudget {
    /// -174 dBm/Hz density, 180 kHz user bandwidth, 10 dB sensor figure.
    fn default() -> Self {
        Self::from_noise(-174.0, 180e3, 10.0)
    }
}

/// One least-squares channel-estimation block: the RIS cycles through the
/// first `pilot_count` DFT-matrix configurations while the BS records one
/// symbol per configuration. `y_bs` is already normalized by the (known)
/// pilot symbol, so the estimator is a bare correlation.
#[derive(Debug, Clone, PartialEq)]
pub struct LsCeData {
    pub pilot_count: usize,
    /// N x P, column k holds configuration exp(-j 2 pi n k / N).
    pub config: DMatrix<Complex64>,
    /// M x P normalized received block.
    pub y_bs: DMatrix<Complex64>,
}

/// First `p` columns of the N-point DFT matrix, the pilot configuration
/// schedule of the LS estimator.
pub fn dft_pilot_columns(n: usize, p: usize) -> Result<DMatrix<Complex64>, BeamformingError> {
    if p == 0 || p > n {
        return Err(BeamformingError::InvalidPilots(
            "pilot count must satisfy 1 <= P <= N",
        ));
    }
    Ok(DMatrix::from_fn(n, p, |row, col| {
        Complex64::from_polar(1.0, -TAU * (row * col) as f64 / n as f64)
    }))
}

/// Simulate the uplink pilot block: Y[:, k] = s' H^T f_k + noise, with the
/// known pilot amplitude s' divided out of both terms.
pub fn simulate_ls_pilots(
    channel: &ChannelRealization,
    pilot_count: usize,
    pilot_amplitude: f64,
    sigma_n2: f64,
    rng: &mut SeededRng,
) -> Result<LsCeData, BeamformingError> {
    if !(pilot_amplitude > 0.0) {
        return Err(BeamformingError::InvalidPilots("pilot amplitude must be positive"));
    }
    if !(sigma_n2 >= 0.0) {
        return Err(BeamformingError::InvalidPilots("noise variance must be >= 0"));
    }
    let config = dft_pilot_columns(channel.n_ris(), pilot_count)?;
    let clean = channel.h.transpose() * &config;
    let y_bs = DMatrix::from_fn(clean.nrows(), clean.ncols(), |m, p| {
        let noise = sample_complex_gaussian(rng, Complex64::new(0.0, 0.0), sigma_n2);
        clean[(m, p)] + noise / pilot_amplitude
    });
    Ok(LsCeData {
        pilot_count,
        config,
        y_bs,
    })
}

/// Least-squares cascade estimate (1/P) F* Y^T. Exact for P = N in the
/// noiseless case; for P < N it returns (N/P) times the projection of H
/// onto the span of the used configurations.
pub fn ls_channel_estimate(data: &LsCeData) -> Result<DMatrix<Complex64>, BeamformingError> {
    if data.config.ncols() != data.pilot_count {
        return Err(BeamformingError::DimensionMismatch {
            got: data.config.ncols(),
            expected: data.pilot_count,
        });
    }
    if data.y_bs.ncols() != data.pilot_count {
        return Err(BeamformingError::DimensionMismatch {
            got: data.y_bs.ncols(),
            expected: data.pilot_count,
        });
    }
    let scaled = data.config.map(|e| e.conj() / data.pilot_count as f64);
    Ok(scaled * data.y_bs.transpose())
}

/// Sensed-phase design rule: theta_n = exp(-j (phi_n + 2 psi_n)) from the
/// per-element phase estimates and the geometry-known BS link phases.
pub fn irf_beamform(phi_hat: &[f64], psi: &[f64]) -> Result<PhaseConfig, BeamformingError> {
    if phi_hat.len() != psi.len() {
        return Err(BeamformingError::DimensionMismatch {
            got: psi.len(),
            expected: phi_hat.len(),
        });
    }
    if phi_hat.is_empty() {
        return Err(BeamformingError::DimensionMismatch { got: 0, expected: 1 });
    }
    let theta = DVector::from_fn(phi_hat.len(), |n, _| {
        Complex64::from_polar(1.0, -(phi_hat[n] + 2.0 * psi[n]))
    });
    Ok(PhaseConfig { theta })
}

/// Perfect-CSI configuration theta_n = exp(-j arg(f_n* g_n^T w)): aligns
/// every cascade term, achieving |f^H Theta G w| = sum_n |f_n| |g_n^T w|.
pub fn oracle_beamform(
    channel: &ChannelRealization,
    bf: &Beamformers,
) -> Result<PhaseConfig, BeamformingError> {
    if bf.w.len() != channel.n_bs() {
        return Err(BeamformingError::DimensionMismatch {
            got: bf.w.len(),
            expected: channel.n_bs(),
        });
    }
    let hw = &channel.h * &bf.w;
    let theta = DVector::from_fn(channel.n_ris(), |n, _| {
        if hw[n].norm() > 0.0 {
            Complex64::from_polar(1.0, -hw[n].arg())
        } else {
            Complex64::new(1.0, 0.0)
        }
    });
    Ok(PhaseConfig { theta })
}

/// Output of the alternating ascent: final configuration and precoder, the
/// SNR-scaled objective after every half-step, and the rounds used.
#[derive(Debug, Clone)]
pub struct AlternatingResult {
    pub config: PhaseConfig,
    pub w: DVector<Complex64>,
    pub objective_trace: Vec<f64>,
    pub rounds: usize,
}

/// Coordinate ascent on |theta^T H w|^2: matched-filter w for fixed theta,
/// phase alignment theta for fixed w. Each half-step is nondecreasing; stops
/// when a round improves the objective by less than 1e-9 relative, or after
/// `max_rounds` (default contract is 50).
pub fn alternating_beamform(
    h: &DMatrix<Complex64>,
    p_max: f64,
    sigma_z2: f64,
    max_rounds: usize,
) -> AlternatingResult {
    let (n, m) = (h.nrows(), h.ncols());
    let sqrt_p = p_max.sqrt();
    let mut theta = DVector::from_element(n, Complex64::new(1.0, 0.0));
    let mut w: DVector<Complex64> = DVector::zeros(m);
    let mut trace = Vec::new();
    let mut rounds = 0;
    let objective = |theta: &DVector<Complex64>, w: &DVector<Complex64>| {
        let hw = h * w;
        let s: Complex64 = theta.iter().zip(hw.iter()).map(|(t, x)| t * x).sum();
        s.norm_sqr() / sigma_z2
    };
    let mut prev = f64::NEG_INFINITY;
    for _ in 0..max_rounds.max(1) {
        rounds += 1;
        let u = h.transpose() * &theta;
        let un = u.norm();
        if un > 0.0 {
            w = u.map(|e| e.conj() * (sqrt_p / un));
        } else {
            // degenerate H^T theta; park all power on the first antenna
            w.fill(Complex64::new(0.0, 0.0));
            w[0] = Complex64::new(sqrt_p, 0.0);
        }
        trace.push(objective(&theta, &w));
        let hw = h * &w;
        for (t, x) in theta.iter_mut().zip(hw.iter()) {
            *t = if x.norm() > 0.0 {
                Complex64::from_polar(1.0, -x.arg())
            } else {
                Complex64::new(1.0, 0.0)
            };
        }
        let obj = objective(&theta, &w);
        trace.push(obj);
        if prev.is_finite() && obj - prev <= 1e-9 * prev.abs() {
            break;
        }
        prev = obj;
    }
    AlternatingResult {
        config: PhaseConfig { theta },
        w,
        objective_trace: trace,
        rounds,
    }
}

/// Downlink SNR |f^H diag(theta) G w|^2 / sigma_z^2 of a configuration
/// under the true channel.
pub fn snr(
    channel: &ChannelRealization,
    config: &PhaseConfig,
    bf: &Beamformers,
    budget: &LinkBudget,
) -> f64 {
    let hw = &channel.h * &bf.w;
    let s: Complex64 = config
        .theta
        .iter()
        .zip(hw.iter())
        .map(|(t, x)| t * x)
        .sum();
    s.norm_sqr() / budget.sigma_z2
}

/// Shannon spectral efficiency log2(1 + snr) in bits/s/Hz.
pub fn spectral_efficiency(snr: f64) -> f64 {
    (1.0 + snr).log2()
}

/// Benchmark configuration with i.i.d. uniform phases.
pub fn random_phase_config(n: usize, rng: &mut SeededRng) -> PhaseConfig {
    let theta = DVector::from_fn(n, |_, _| {
        Complex64::from_polar(1.0, rng.random_range(-PI..PI))
    });
    PhaseConfig { theta }
}

/// How a scheme acquires channel knowledge, for pilot accounting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsiScheme {
    /// Genie CSI, no pilots.
    Oracle,
    /// Three-slot sensed acquisition (two amplitude slots, one sweep).
    IrfVmEm,
    /// DFT-configuration pilots, one slot per element.
    LsCe,
    /// No acquisition at all.
    Random,
}

/// Pilot slots a scheme spends on an N-element RIS.
pub fn pilot_slots(scheme: CsiScheme, n: usize) -> usize {
    match scheme {
        CsiScheme::Oracle | CsiScheme::Random => 0,
        CsiScheme::IrfVmEm => 3,
        CsiScheme::LsCe => n,
    }
}
