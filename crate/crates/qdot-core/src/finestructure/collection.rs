//! Fraction of a point dipole's radiated power collected by an objective.
//!
//! Homogeneous-medium model: the dipole radiates the classical
//! dP/dΩ ∝ |d|² − |n̂·d|² pattern and the objective accepts the upward cone
//! of half-angle asin(NA/n). This is an analytic stand-in for a full
//! electromagnetic treatment of the structured environment.

use num_complex::Complex64;

use super::{DipoleVector, FinestructureError};

/// Collection cone of an objective looking down the +z axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollectionGeometry {
    /// Numerical aperture, 0 < NA < n.
    pub numerical_aperture: f64,
    /// Refractive index of the emission half-space.
    pub medium_index: f64,
}

impl CollectionGeometry {
    pub fn new(numerical_aperture: f64, medium_index: f64) -> Result<Self, FinestructureError> {
        if !(numerical_aperture > 0.0)
            || !(medium_index > 0.0)
            || numerical_aperture >= medium_index
        {
            return Err(FinestructureError::BadAperture);
        }
        Ok(Self {
            numerical_aperture,
            medium_index,
        })
    }

    /// Cone half-angle asin(NA/n), radians.
    pub fn half_angle(&self) -> f64 {
        libm::asin(self.numerical_aperture / self.medium_index)
    }
}

/// Fraction of the total radiated power falling inside the upward collection
/// cone, for a (possibly complex) dipole vector.
///
/// Closed form by decomposition into in-plane and z components: with
/// c = cos(half-angle), A = |dx|² + |dy|², and |d|² the full squared norm,
///
/// ∫cone (|d|² − |n̂·d|²) dΩ
///   = 2π(1−c)|d|² − π·A·[(1−c) − (1−c³)/3] − 2π|dz|²(1−c³)/3
///
/// normalized by the total (8π/3)|d|². The full sphere (both hemispheres at
/// 90° half-angle) collects everything.
pub fn collection_fraction(
    dipole: &DipoleVector,
    g: &CollectionGeometry,
) -> Result<f64, FinestructureError> {
    let norm_sq: f64 = dipole.iter().map(Complex64::norm_sqr).sum();
    if norm_sq == 0.0 {
        return Err(FinestructureError::ZeroDipole);
    }
    let c = libm::cos(g.half_angle());
    let in_plane = dipole[0].norm_sqr() + dipole[1].norm_sqr();
    let z = dipole[2].norm_sqr();
    let i1 = (1.0 - c) - (1.0 - c * c * c) / 3.0;
    let i2 = (1.0 - c * c * c) / 3.0;
    let pi = core::f64::consts::PI;
    let cone = 2.0 * pi * (1.0 - c) * norm_sq - pi * in_plane * i1 - 2.0 * pi * z * i2;
    Ok(cone / (8.0 * pi / 3.0 * norm_sq))
}
