//! Sampled spectrum container shared by the analysis modules.
//!
//! The axis is a strictly increasing photon-energy grid in eV; counts are
//! non-negative reals, one per grid point, interpreted as a sampled count
//! density. Grids need not be uniform: real spectrometers sample uniformly in
//! wavelength, and operations that require a uniform energy grid
//! (deconvolution) resample explicitly.

use alloc::string::String;
use alloc::vec::Vec;
use thiserror::Error;

use crate::units::{energy_to_wavelength, PhotonEnergy, Wavelength, HC_EV_NM};

#[derive(Debug, Error, PartialEq)]
pub enum SpectrumError {
    #[error("axis and counts lengths differ: {axis} vs {counts}")]
    LengthMismatch { axis: usize, counts: usize },
    #[error("spectrum needs at least 2 points, got {0}")]
    TooShort(usize),
    #[error("axis not strictly increasing at index {0}")]
    NonMonotonicAxis(usize),
    #[error("negative counts at index {0}")]
    NegativeCounts(usize),
    #[error("non-positive or non-finite energy at index {0}")]
    BadEnergy(usize),
    #[error("operation requires a uniform energy grid")]
    NonUniformAxis,
}

/// Acquisition metadata carried alongside a spectrum.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SpectrumMetadata {
    /// Excitation power in nW.
    pub power_nw: Option<f64>,
    /// Sample temperature in K.
    pub temperature_k: Option<f64>,
    /// Free-form integration descriptor, e.g. "60 s x 3".
    pub integration: Option<String>,
    /// Any further key-value pairs, preserved in file order.
    pub extra: Vec<(String, String)>,
}

/// Intensity samples on a strictly increasing photon-energy grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    axis_ev: Vec<f64>,
    counts: Vec<f64>,
    metadata: SpectrumMetadata,
}

impl Spectrum {
    pub fn new(
        axis_ev: Vec<f64>,
        counts: Vec<f64>,
        metadata: SpectrumMetadata,
    ) -> Result<Self, SpectrumError> {
        if axis_ev.len() != counts.len() {
            return Err(SpectrumError::LengthMismatch {
                axis: axis_ev.len(),
                counts: counts.len(),
            });
        }
        if axis_ev.len() < 2 {
            return Err(SpectrumError::TooShort(axis_ev.len()));
        }
        for (i, &e) in axis_ev.iter().enumerate() {
            if !(e > 0.0) || !e.is_finite() {
                return Err(SpectrumError::BadEnergy(i));
            }
            if i > 0 && e <= axis_ev[i - 1] {
                return Err(SpectrumError::NonMonotonicAxis(i));
            }
        }
        if let Some(i) = counts.iter().position(|&c| !(c >= 0.0) || !c.is_finite()) {
            return Err(SpectrumError::NegativeCounts(i));
        }
        Ok(Self {
            axis_ev,
            counts,
            metadata,
        })
    }

    /// Builds a spectrum from samples on an increasing-wavelength grid (the
    /// native spectrometer order); the energy axis comes out increasing, so
    /// the sample order is reversed.
    pub fn from_wavelength_samples(
        wavelength_nm: &[f64],
        counts: &[f64],
        metadata: SpectrumMetadata,
    ) -> Result<Self, SpectrumError> {
        let mut axis: Vec<f64> = wavelength_nm.iter().rev().map(|&l| HC_EV_NM / l).collect();
        let c: Vec<f64> = counts.iter().rev().copied().collect();
        // guard against zero/negative wavelengths mapping to nonsense
        for e in &mut axis {
            if !e.is_finite() {
                *e = -1.0;
            }
        }
        Self::new(axis, c, metadata)
    }

    pub fn len(&self) -> usize {
        self.axis_ev.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction requires >= 2 points
    }

    pub fn axis_ev(&self) -> &[f64] {
        &self.axis_ev
    }

    pub fn counts(&self) -> &[f64] {
        &self.counts
    }

    pub fn metadata(&self) -> &SpectrumMetadata {
        &self.metadata
    }

    pub fn metadata_mut(&mut self) -> &mut SpectrumMetadata {
        &mut self.metadata
    }

    pub fn energy_at(&self, i: usize) -> PhotonEnergy {
        PhotonEnergy::from_ev(self.axis_ev[i]).expect("validated at construction")
    }

    pub fn wavelength_at(&self, i: usize) -> Wavelength {
        energy_to_wavelength(self.energy_at(i))
    }

    /// Grid spacing if the axis is uniform within `rel_tol`, else None.
    pub fn uniform_spacing(&self, rel_tol: f64) -> Option<f64> {
        let d0 = (self.axis_ev[self.len() - 1] - self.axis_ev[0]) / (self.len() - 1) as f64;
        for w in self.axis_ev.windows(2) {
            if ((w[1] - w[0]) - d0).abs() > rel_tol * d0 {
                return None;
            }
        }
        Some(d0)
    }

    /// Trapezoidal integral of counts over energy, in counts·eV⁻¹·eV = counts.
    pub fn integrate(&self) -> f64 {
        let mut total = 0.0;
        for i in 1..self.len() {
            let de = self.axis_ev[i] - self.axis_ev[i - 1];
            total += 0.5 * (self.counts[i] + self.counts[i - 1]) * de;
        }
        total
    }

    /// Linear-interpolation resample onto a uniform energy grid covering the
    /// same span with spacing at most `max_spacing_ev`.
    pub fn resample_uniform(&self, max_spacing_ev: f64) -> Result<Spectrum, SpectrumError> {
        if !(max_spacing_ev > 0.0) {
            return Err(SpectrumError::NonUniformAxis);
        }
        let span = self.axis_ev[self.len() - 1] - self.axis_ev[0];
        let n = libm::ceil(span / max_spacing_ev) as usize + 1;
        let n = n.max(2);
        let step = span / (n - 1) as f64;
        let mut axis = Vec::with_capacity(n);
        let mut counts = Vec::with_capacity(n);
        let mut j = 0usize;
        for i in 0..n {
            let e = if i + 1 == n {
                self.axis_ev[self.len() - 1]
            } else {
                self.axis_ev[0] + step * i as f64
            };
            while j + 2 < self.len() && self.axis_ev[j + 1] < e {
                j += 1;
            }
            let (e0, e1) = (self.axis_ev[j], self.axis_ev[j + 1]);
            let t = ((e - e0) / (e1 - e0)).clamp(0.0, 1.0);
            axis.push(e);
            counts.push(self.counts[j] * (1.0 - t) + self.counts[j + 1] * t);
        }
        Spectrum::new(axis, counts, self.metadata.clone())
    }
}

/// Uniform energy axis with `n` points spanning [start, stop].
pub fn uniform_axis_ev(start_ev: f64, stop_ev: f64, n: usize) -> Vec<f64> {
    let step = (stop_ev - start_ev) / (n - 1) as f64;
    (0..n).map(|i| start_ev + step * i as f64).collect()
}
