//! Lorentzian lineshapes: synthesis, multi-peak fitting, instrument-response
//! convolution, and regularized deconvolution of measured spectra.

use alloc::vec::Vec;
use thiserror::Error;

use crate::numeric::sampling;
use crate::spectrum::{Spectrum, SpectrumError, SpectrumMetadata};
use crate::units::PhotonEnergy;

mod deconv;
mod fit;

pub use deconv::{deconvolve, DeconvResult};
pub use fit::{fit_peaks, PeakFit, PeakUncertainty};

#[derive(Debug, Error)]
pub enum LineshapeError {
    #[error("peak fwhm must be positive, got {0} eV")]
    NonPositiveFwhm(f64),
    #[error("peak area must be non-negative, got {0}")]
    NegativeArea(f64),
    #[error("background must be non-negative, got {0}")]
    NegativeBackground(f64),
    #[error("need at least {needed} points to fit {peaks} peaks, got {got}")]
    TooFewPoints {
        needed: usize,
        got: usize,
        peaks: usize,
    },
    #[error("regularization strength must be non-negative, got {0}")]
    NegativeLambda(f64),
    #[error("fitted peak center left the physical domain: {0} eV")]
    CenterOutOfDomain(f64),
    #[error("fit did not converge after {iterations} iterations")]
    NonConvergence {
        iterations: usize,
        best: alloc::boxed::Box<PeakFit>,
    },
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
}

/// Warnings attached to otherwise-successful results.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LineshapeWarning {
    /// Two fitted centers collapsed onto each other (within 1e-3 of a width).
    DegeneratePeaks(usize, usize),
    /// Deconvolution ran unregularized on an ill-conditioned operator.
    IllConditioned,
}

/// A single Lorentzian line: center, full width at half maximum, and
/// integrated area, all in eV / counts·eV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzianPeak {
    pub center: PhotonEnergy,
    pub fwhm_ev: f64,
    pub area: f64,
}

impl LorentzianPeak {
    pub fn new(center: PhotonEnergy, fwhm_ev: f64, area: f64) -> Result<Self, LineshapeError> {
        if !(fwhm_ev > 0.0) || !fwhm_ev.is_finite() {
            return Err(LineshapeError::NonPositiveFwhm(fwhm_ev));
        }
        if !(area >= 0.0) || !area.is_finite() {
            return Err(LineshapeError::NegativeArea(area));
        }
        Ok(Self {
            center,
            fwhm_ev,
            area,
        })
    }

    /// Density at energy `e`: area·(Γ/2π)/((e−c)² + (Γ/2)²).
    pub fn density(&self, e_ev: f64) -> f64 {
        let hw = 0.5 * self.fwhm_ev;
        let d = e_ev - self.center.as_ev();
        self.area * core::f64::consts::FRAC_1_PI * hw / (d * d + hw * hw)
    }

    /// Peak height (density at the center).
    pub fn height(&self) -> f64 {
        self.area * 2.0 / (core::f64::consts::PI * self.fwhm_ev)
    }
}

/// A sum of Lorentzian peaks over a constant background, peaks ordered by
/// center energy.
#[derive(Debug, Clone, PartialEq)]
pub struct PeakModel {
    peaks: Vec<LorentzianPeak>,
    background: f64,
}

impl PeakModel {
    pub fn new(mut peaks: Vec<LorentzianPeak>, background: f64) -> Result<Self, LineshapeError> {
        if !(background >= 0.0) || !background.is_finite() {
            return Err(LineshapeError::NegativeBackground(background));
        }
        peaks.sort_by(|a, b| a.center.as_ev().total_cmp(&b.center.as_ev()));
        Ok(Self { peaks, background })
    }

    pub fn peaks(&self) -> &[LorentzianPeak] {
        &self.peaks
    }

    pub fn background(&self) -> f64 {
        self.background
    }

    /// Model density at energy `e`, background included.
    pub fn density(&self, e_ev: f64) -> f64 {
        self.background + self.peaks.iter().map(|p| p.density(e_ev)).sum::<f64>()
    }

    fn peaks_only_density(&self, e_ev: f64) -> f64 {
        self.peaks.iter().map(|p| p.density(e_ev)).sum()
    }
}

/// Spectrometer resolution function: a unit-area Lorentzian of the calibrated
/// width (15 µeV for the instrument modeled here).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstrumentResponse {
    pub fwhm_ev: f64,
}

impl InstrumentResponse {
    pub const DEFAULT_FWHM_EV: f64 = 15e-6;

    pub fn new(fwhm_ev: f64) -> Result<Self, LineshapeError> {
        if !(fwhm_ev > 0.0) || !fwhm_ev.is_finite() {
            return Err(LineshapeError::NonPositiveFwhm(fwhm_ev));
        }
        Ok(Self { fwhm_ev })
    }

    pub fn density(&self, offset_ev: f64) -> f64 {
        let hw = 0.5 * self.fwhm_ev;
        core::f64::consts::FRAC_1_PI * hw / (offset_ev * offset_ev + hw * hw)
    }
}

impl Default for InstrumentResponse {
    fn default() -> Self {
        Self {
            fwhm_ev: Self::DEFAULT_FWHM_EV,
        }
    }
}

/// Per-bin noise applied when synthesizing a spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Noise {
    None,
    /// Each bin drawn Poisson with the model value as mean; deterministic per
    /// seed.
    Poisson { seed: u64 },
}

/// Evaluates a peak model on an energy grid, optionally with per-bin Poisson
/// counting noise.
pub fn synthesize(
    model: &PeakModel,
    axis_ev: &[f64],
    noise: Noise,
    metadata: SpectrumMetadata,
) -> Result<Spectrum, LineshapeError> {
    let mut counts: Vec<f64> = axis_ev.iter().map(|&e| model.density(e)).collect();
    if let Noise::Poisson { seed } = noise {
        let mut rng = sampling::stream_rng(seed, 0);
        for c in &mut counts {
            *c = sampling::poisson(&mut rng, *c) as f64;
        }
    }
    Ok(Spectrum::new(axis_ev.to_vec(), counts, metadata)?)
}

/// Discrete convolution of the model's peaks with the instrument response on
/// a uniform energy grid; the constant background is additive downstream of
/// the spectrometer and passes through unconvolved.
///
/// The sampled kernel is renormalized to unit discrete area, so total counts
/// are preserved up to edge truncation. Accuracy requires the grid to sample
/// the response, spacing ≲ fwhm/5; a kernel narrower than the grid reduces to
/// the identity.
pub fn convolve(
    model: &PeakModel,
    irf: &InstrumentResponse,
    axis_ev: &[f64],
    metadata: SpectrumMetadata,
) -> Result<Spectrum, LineshapeError> {
    let spacing = uniform_spacing(axis_ev).ok_or(SpectrumError::NonUniformAxis)?;
    let n = axis_ev.len();
    let signal: Vec<f64> = axis_ev.iter().map(|&e| model.peaks_only_density(e)).collect();
    let kernel = sampled_kernel(irf, spacing, n - 1);
    let mut counts = Vec::with_capacity(n);
    for i in 0..n {
        let mut acc = 0.0;
        for (j, s) in signal.iter().enumerate() {
            acc += s * kernel[(i as isize - j as isize + (n as isize - 1)) as usize];
        }
        counts.push((acc + model.background).max(0.0));
    }
    Ok(Spectrum::new(axis_ev.to_vec(), counts, metadata)?)
}

/// Kernel samples at offsets −max_offset..=max_offset times `spacing`,
/// normalized to unit sum.
fn sampled_kernel(irf: &InstrumentResponse, spacing: f64, max_offset: usize) -> Vec<f64> {
    let mut k: Vec<f64> = (-(max_offset as isize)..=max_offset as isize)
        .map(|m| irf.density(m as f64 * spacing))
        .collect();
    let sum: f64 = k.iter().sum();
    for v in &mut k {
        *v /= sum;
    }
    k
}

fn uniform_spacing(axis: &[f64]) -> Option<f64> {
    if axis.len() < 2 {
        return None;
    }
    let d0 = (axis[axis.len() - 1] - axis[0]) / (axis.len() - 1) as f64;
    if d0 <= 0.0 {
        return None;
    }
    for w in axis.windows(2) {
        if ((w[1] - w[0]) - d0).abs() > 1e-6 * d0 {
            return None;
        }
    }
    Some(d0)
}
