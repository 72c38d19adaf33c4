//! Simulation library for sensing reconfigurable intelligent surfaces (RIS)
//! that estimate channel phases from power-only interference measurements.
//!
//! A sensing RIS carries a cheap power detector behind each reflecting
//! element. When the base station and the user transmit simultaneously with a
//! small frequency offset, each detector observes an interference fringe
//! whose phase equals the phase difference of the two incident links. Reading
//! that fringe off takes three pilot slots in total, independent of the
//! number of RIS elements, instead of the N pilot slots a cascade
//! channel-sounding scheme needs.
//!
//! The crate is organized bottom-up:
//!
//! * [`numerics`]: scaled Bessel functions, adaptive quadrature, circular
//!   arithmetic and reproducible random number streams.
//! * [`channel`]: geometry-driven Rician channels with uniform planar arrays.
//! * [`irf`]: synthesis of the three-slot interference power waveforms.
//! * [`estimators`]: DFT, Newton maximum-likelihood and von Mises EM phase
//!   estimators operating on one element's power samples.
//! * [`crlb`]: exact and asymptotic Cramer-Rao lower bounds for the phase
//!   estimation problem, plus the approximation error bound.
//! * [`beamforming`]: turning phase estimates into RIS configurations and
//!   scoring them against oracle, least-squares and random baselines.
//! * [`harness`]: Monte-Carlo experiment drivers behind the `irf-estim`
//!   binary, emitting deterministic CSV tables.
//!
//! The `examples/` directory contains one runnable program per capability;
//! start with `phase_estimation` and `beamforming_pipeline`.

pub mod beamforming;
pub mod channel;
pub mod crlb;
pub mod estimators;
pub mod harness;
pub mod irf;
pub mod numerics;
