//! Geometry-driven Rician fading channels with uniform planar arrays.
//!
//! Both terminals carry half-wavelength-spaced planar arrays lying in planes
//! parallel to x-z, boresight along the y axis. Azimuth is measured from
//! boresight inside the horizontal plane, elevation toward +z, so a unit
//! direction decomposes as (cos el sin az, cos el cos az, sin el). The RIS
//! sits at `ris_position` and sees the base station and the user through a
//! line-of-sight path plus a configurable number of random scattered paths;
//! the scattered power is normalized to the line-of-sight power and the two
//! are mixed by the Rician kappa factor.

use crate::numerics::{sample_complex_gaussian, wrap_phase, SeededRng};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use thiserror::Error;

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(&'static str),
    #[error("invalid fading spec: {0}")]
    InvalidFading(&'static str),
    #[error("element index {index} out of range for {count} RIS elements")]
    ElementIndex { index: usize, count: usize },
    #[error("beamformer has {got} entries, expected {expected}")]
    DimensionMismatch { got: usize, expected: usize },
}

/// Positions, array layouts and carrier of one BS / RIS / user deployment.
#[derive(Debug, Clone, PartialEq)]
pub struct Geometry {
    pub bs_position: [f64; 3],
    pub user_position: [f64; 3],
    pub ris_position: [f64; 3],
    /// RIS element grid (rows along z, columns along x), N = rows * cols.
    pub ris_dims: (usize, usize),
    /// BS antenna grid, M = rows * cols.
    pub bs_dims: (usize, usize),
    /// Element spacing in meters, usually half a wavelength.
    pub spacing: f64,
    pub carrier_hz: f64,
}

impl Geometry {
    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_hz
    }

    pub fn n_ris(&self) -> usize {
        self.ris_dims.0 * self.ris_dims.1
    }

    pub fn n_bs(&self) -> usize {
        self.bs_dims.0 * self.bs_dims.1
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        if self.ris_dims.0 == 0 || self.ris_dims.1 == 0 || self.bs_dims.0 == 0 || self.bs_dims.1 == 0
        {
            return Err(ChannelError::InvalidGeometry("array dims must be >= 1"));
        }
        if !(self.spacing > 0.0 && self.spacing.is_finite()) {
            return Err(ChannelError::InvalidGeometry("spacing must be positive"));
        }
        if !(self.carrier_hz > 0.0 && self.carrier_hz.is_finite()) {
            return Err(ChannelError::InvalidGeometry("carrier must be positive"));
        }
        let pairs = [
            (self.bs_position, self.ris_position),
            (self.user_position, self.ris_position),
            (self.bs_position, self.user_position),
        ];
        if pairs.iter().any(|(a, b)| a == b) {
            return Err(ChannelError::InvalidGeometry(
                "positions must be pairwise distinct",
            ));
        }
        Ok(())
    }
}

/// Small-scale fading model: one optional line-of-sight path, `n_nlos`
/// scattered paths, mixed by the Rician kappa factor, on top of a power-law
/// large-scale loss.
#[derive(Debug, Clone, PartialEq)]
pub struct FadingSpec {
    pub kappa: f64,
    pub n_los: usize,
    pub n_nlos: usize,
    pub pathloss_exponent: f64,
    /// Amplitude reference loss at 1 m in dB; `None` means free space at the
    /// carrier wavelength, 20 log10(4 pi / lambda).
    pub ref_loss_db_1m: Option<f64>,
}

impl FadingSpec {
    /// Rician fading with one LOS and four scattered paths over free-space
    /// square-law loss.
    pub fn rician(kappa: f64) -> Self {
        Self {
            kappa,
            n_los: 1,
            n_nlos: 4,
            pathloss_exponent: 2.0,
            ref_loss_db_1m: None,
        }
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        if self.kappa.is_nan() || self.kappa < 0.0 {
            return Err(ChannelError::InvalidFading("kappa must be >= 0"));
        }
        if self.n_los > 1 {
            return Err(ChannelError::InvalidFading("n_los must be 0 or 1"));
        }
        if !(self.pathloss_exponent > 0.0 && self.pathloss_exponent.is_finite()) {
            return Err(ChannelError::InvalidFading("pathloss exponent must be positive"));
        }
        if let Some(db) = self.ref_loss_db_1m {
            if !db.is_finite() {
                return Err(ChannelError::InvalidFading("reference loss must be finite"));
            }
        }
        Ok(())
    }

    /// Amplitude gain of a path at distance `d` meters.
    fn path_amplitude(&self, wavelength: f64, d: f64) -> f64 {
        let ref_amp = match self.ref_loss_db_1m {
            Some(db) => 10f64.powf(-db / 20.0),
            None => wavelength / (4.0 * PI),
        };
        ref_amp * d.powf(-0.5 * self.pathloss_exponent)
    }
}

/// One draw of the BS-RIS matrix G, the RIS-user vector f and their cascade
/// H = diag(f*) G.
#[derive(Debug, Clone)]
pub struct ChannelRealization {
    pub g: DMatrix<Complex64>,
    pub f: DVector<Complex64>,
    pub h: DMatrix<Complex64>,
}

impl ChannelRealization {
    /// Build from G and f, computing the cascade rows h_n = f_n* g_n.
    pub fn from_parts(g: DMatrix<Complex64>, f: DVector<Complex64>) -> Result<Self, ChannelError> {
        if g.nrows() != f.len() {
            return Err(ChannelError::DimensionMismatch {
                got: f.len(),
                expected: g.nrows(),
            });
        }
        let mut h = g.clone();
        for (n, mut row) in h.row_iter_mut().enumerate() {
            row *= f[n].conj();
        }
        Ok(Self { g, f, h })
    }

    pub fn n_ris(&self) -> usize {
        self.g.nrows()
    }

    pub fn n_bs(&self) -> usize {
        self.g.ncols()
    }
}

/// Steering vector of a planar array toward (azimuth, elevation); entry
/// (p, q) carries phase 2 pi s (p sin el + q cos el sin az), entry (0, 0) is
/// 1, rows indexed along z, row-major flattening.
pub fn upa_steering(
    azimuth: f64,
    elevation: f64,
    dims: (usize, usize),
    spacing_over_wavelength: f64,
) -> DVector<Complex64> {
    let (rows, cols) = dims;
    let uz = elevation.sin();
    let ux = elevation.cos() * azimuth.sin();
    DVector::from_fn(rows * cols, |i, _| {
        let p = (i / cols) as f64;
        let q = (i % cols) as f64;
        Complex64::from_polar(1.0, TAU * spacing_over_wavelength * (p * uz + q * ux))
    })
}

/// (azimuth, elevation, distance) of `to` as seen from `from`.
pub fn link_angles(from: [f64; 3], to: [f64; 3]) -> (f64, f64, f64) {
    let d = [to[0] - from[0], to[1] - from[1], to[2] - from[2]];
    let dist = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
    let az = d[0].atan2(d[1]);
    let el = (d[2] / dist).clamp(-1.0, 1.0).asin();
    (az, el, dist)
}

struct LosGeometry {
    dist: f64,
    prop_phase: f64,
    a_ris: DVector<Complex64>,
    a_far: DVector<Complex64>,
}

fn los_geometry(geom: &Geometry, far_pos: [f64; 3], far_dims: (usize, usize)) -> LosGeometry {
    let sow = geom.spacing / geom.wavelength();
    let (az_r, el_r, dist) = link_angles(geom.ris_position, far_pos);
    let (az_f, el_f, _) = link_angles(far_pos, geom.ris_position);
    LosGeometry {
        dist,
        prop_phase: wrap_phase(-TAU * dist / geom.wavelength()),
        a_ris: upa_steering(az_r, el_r, geom.ris_dims, sow),
        a_far: upa_steering(az_f, el_f, far_dims, sow),
    }
}

fn random_steering(
    dims: (usize, usize),
    sow: f64,
    rng: &mut SeededRng,
) -> DVector<Complex64> {
    let az = rng.random_range(-PI..PI);
    let el = rng.random_range(-FRAC_PI_2..FRAC_PI_2);
    upa_steering(az, el, dims, sow)
}

/// One link matrix (RIS side rows, far side columns): LOS outer product plus
/// normalized scattered paths, E||NLOS||_F^2 = ||LOS||_F^2.
fn link_matrix(
    geom: &Geometry,
    fading: &FadingSpec,
    far_pos: [f64; 3],
    far_dims: (usize, usize),
    rng: &mut SeededRng,
) -> DMatrix<Complex64> {
    let sow = geom.spacing / geom.wavelength();
    let los = los_geometry(geom, far_pos, far_dims);
    let scale = Complex64::from_polar(
        fading.path_amplitude(geom.wavelength(), los.dist),
        los.prop_phase,
    );
    let (c_los, c_nlos) = if fading.kappa.is_infinite() {
        (1.0, 0.0)
    } else {
        (
            (fading.kappa / (1.0 + fading.kappa)).sqrt(),
            (1.0 / (1.0 + fading.kappa)).sqrt(),
        )
    };

    let mut mat = DMatrix::zeros(geom.n_ris(), far_dims.0 * far_dims.1);
    if fading.n_los == 1 {
        mat += (&los.a_ris * los.a_far.transpose()).map(|e| e * scale * c_los);
    }
    if c_nlos > 0.0 {
        for _ in 0..fading.n_nlos {
            let a_r = random_steering(geom.ris_dims, sow, rng);
            let a_f = random_steering(far_dims, sow, rng);
            let coef = sample_complex_gaussian(
                rng,
                Complex64::new(0.0, 0.0),
                1.0 / fading.n_nlos as f64,
            );
            mat += (&a_r * a_f.transpose()).map(|e| e * scale * c_nlos * coef);
        }
    }
    mat
}

/// Draw the BS-RIS matrix, the RIS-user vector and their cascade.
pub fn generate_channels(
    geom: &Geometry,
    fading: &FadingSpec,
    rng: &mut SeededRng,
) -> Result<ChannelRealization, ChannelError> {
    geom.validate()?;
    fading.validate()?;
    let g = link_matrix(geom, fading, geom.bs_position, geom.bs_dims, rng);
    let f_mat = link_matrix(geom, fading, geom.user_position, (1, 1), rng);
    let f = f_mat.column(0).into_owned();
    ChannelRealization::from_parts(g, f)
}

/// Phase of the line-of-sight part of (row n of G) dot w, i.e. the
/// geometry-derived link phase a beamforming stage can assume known from the
/// BS and RIS locations alone. For kappa -> infinity it equals
/// arg(g_n^T w) of a generated channel exactly.
pub fn los_link_phase(
    geom: &Geometry,
    w: &DVector<Complex64>,
    n: usize,
) -> Result<f64, ChannelError> {
    geom.validate()?;
    if n >= geom.n_ris() {
        return Err(ChannelError::ElementIndex {
            index: n,
            count: geom.n_ris(),
        });
    }
    if w.len() != geom.n_bs() {
        return Err(ChannelError::DimensionMismatch {
            got: w.len(),
            expected: geom.n_bs(),
        });
    }
    let los = los_geometry(geom, geom.bs_position, geom.bs_dims);
    let beam: Complex64 = los.a_far.iter().zip(w.iter()).map(|(a, wi)| a * wi).sum();
    Ok(wrap_phase(
        los.prop_phase + los.a_ris[n].arg() + beam.arg(),
    ))
}
