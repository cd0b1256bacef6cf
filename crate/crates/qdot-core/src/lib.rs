//! Simulation and analysis toolkit for single-photon-emitting quantum dots.
//!
//! The crate covers the measurement-analysis chain of a quantum-dot
//! photoluminescence experiment:
//!
//! - [`units`] / [`spectrum`]: photon-energy and wavelength conversions and the
//!   sampled-spectrum container shared by the analysis modules.
//! - [`lineshape`]: Lorentzian peak synthesis, multi-peak fitting, instrument
//!   response convolution and regularized deconvolution.
//! - [`finestructure`]: mixed heavy/light-hole exciton states, transition
//!   dipoles of the two fine-structure-split lines, polarizer-angle intensity
//!   patterns and their fits.
//! - [`photon`]: Monte Carlo simulation of a pulsed emitter through a
//!   Hanbury Brown–Twiss interferometer, coincidence histograms, g²(0)
//!   estimation and single-photon purity.
//! - [`array_map`]: emitter-array spectral uniformity statistics and
//!   energy-matched pair discovery.
//!
//! The crate is `no_std` (with `alloc`); file formats, plotting and the
//! command line live in the companion `qdot-cli` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod array_map;
pub mod finestructure;
pub mod lineshape;
pub mod numeric;
pub mod photon;
pub mod spectrum;
pub mod units;

pub use spectrum::Spectrum;
pub use units::{PhotonEnergy, Wavelength};
