//! Pulsed single-photon emitter through a Hanbury Brown–Twiss interferometer:
//! Monte Carlo click-stream simulation, coincidence histograms, g²(0)
//! estimation with dark-count subtraction, histogram model fitting, and
//! single-photon purity.

use alloc::vec::Vec;
use thiserror::Error;

mod correlate;
mod g2;
mod sim;

pub use correlate::{correlate, naive_pair_count, CorrelationConfig};
pub use g2::{
    estimate_g2, fit_histogram, purity, BackgroundEstimate, G2Result, G2Warning, HistogramFit,
};
pub use sim::{
    assemble_streams, pulse_blocks, simulate_block, simulate_streams, BlockOutput, PulseBlock,
    SimOutput, BLOCK_PULSES,
};

#[derive(Debug, Error, PartialEq)]
pub enum PhotonError {
    #[error("emitter model invalid: {0}")]
    InvalidEmitter(&'static str),
    #[error("detector model invalid: {0}")]
    InvalidDetector(&'static str),
    #[error("timestamps must be strictly increasing (violation at index {0})")]
    UnsortedTimestamps(usize),
    #[error("correlation window must be a positive integer multiple of the pulse period")]
    TauMaxNotPeriodMultiple,
    #[error("bin width must be positive and no larger than the window")]
    BadBinWidth,
    #[error("histogram spans {available} full periods per side, need {needed}")]
    InsufficientWindow { needed: usize, available: usize },
    #[error("need at least 2 side peaks, got {0}")]
    TooFewSidePeaks(usize),
    #[error("side peaks carry no counts; g² undefined")]
    DegenerateHistogram,
    #[error("histogram fit did not converge after {iterations} iterations")]
    NonConvergence {
        iterations: usize,
        best: alloc::boxed::Box<HistogramFit>,
    },
    #[error("purity requires 0 ≤ g²(0) ≤ 1, got {0}")]
    PurityDomain(f64),
    #[error("duration must be positive")]
    BadDuration,
}

/// Per-pulse photon statistics of the source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SourceStatistics {
    /// Quantum emitter: a pulse yields one excitation with probability
    /// `p_excite`, two with `p_multi` (re-excitation), otherwise none.
    Emitter { p_excite: f64, p_multi: f64 },
    /// Poissonian reference source (coherent-light benchmark, g² = 1).
    PoissonianReference { mean_photons: f64 },
}

/// Saturation law mapping drive power to excitation probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SaturationLaw {
    /// p = P / (P + P_sat)
    Linear,
    /// p = 1 − exp(−P / P_sat)
    Exponential,
}

impl SaturationLaw {
    pub fn p_excite(&self, power_nw: f64, saturation_nw: f64) -> f64 {
        match self {
            SaturationLaw::Linear => power_nw / (power_nw + saturation_nw),
            SaturationLaw::Exponential => 1.0 - libm::exp(-power_nw / saturation_nw),
        }
    }
}

/// Pulsed-source physics: repetition period, exciton lifetime, and per-pulse
/// photon statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmitterModel {
    pub pulse_period_ns: f64,
    pub lifetime_ns: f64,
    pub statistics: SourceStatistics,
}

impl EmitterModel {
    /// 80 MHz repetition.
    pub const DEFAULT_PULSE_PERIOD_NS: f64 = 12.5;
    /// Typical exciton decay scale; configurable, nothing downstream assumes
    /// this value.
    pub const DEFAULT_LIFETIME_NS: f64 = 1.0;

    pub fn new(
        pulse_period_ns: f64,
        lifetime_ns: f64,
        statistics: SourceStatistics,
    ) -> Result<Self, PhotonError> {
        if !(pulse_period_ns > 0.0) {
            return Err(PhotonError::InvalidEmitter("pulse period must be positive"));
        }
        if !(lifetime_ns > 0.0) {
            return Err(PhotonError::InvalidEmitter("lifetime must be positive"));
        }
        match statistics {
            SourceStatistics::Emitter { p_excite, p_multi } => {
                if !(0.0..=1.0).contains(&p_excite) || !(0.0..=1.0).contains(&p_multi) {
                    return Err(PhotonError::InvalidEmitter(
                        "excitation probabilities must lie in [0, 1]",
                    ));
                }
                if p_excite + p_multi > 1.0 {
                    return Err(PhotonError::InvalidEmitter("p_excite + p_multi exceeds 1"));
                }
            }
            SourceStatistics::PoissonianReference { mean_photons } => {
                if !(mean_photons >= 0.0) || !mean_photons.is_finite() {
                    return Err(PhotonError::InvalidEmitter(
                        "mean photons must be finite and non-negative",
                    ));
                }
            }
        }
        Ok(Self {
            pulse_period_ns,
            lifetime_ns,
            statistics,
        })
    }

    /// Emitter driven at `power_nw` with the given saturation law; the
    /// two-excitation probability stays an explicit parameter.
    pub fn from_drive(
        pulse_period_ns: f64,
        lifetime_ns: f64,
        power_nw: f64,
        saturation_nw: f64,
        law: SaturationLaw,
        p_multi: f64,
    ) -> Result<Self, PhotonError> {
        if !(power_nw >= 0.0) || !(saturation_nw > 0.0) {
            return Err(PhotonError::InvalidEmitter("drive powers must be positive"));
        }
        let p_excite = (law.p_excite(power_nw, saturation_nw) - p_multi).max(0.0);
        Self::new(
            pulse_period_ns,
            lifetime_ns,
            SourceStatistics::Emitter { p_excite, p_multi },
        )
    }
}

/// One detector arm: quantum efficiency, dark-count rate, dead time, and
/// optional Gaussian timing jitter (off by default).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorModel {
    pub efficiency: f64,
    pub dark_rate_hz: f64,
    pub dead_time_ns: f64,
    pub jitter_sigma_ns: Option<f64>,
}

impl DetectorModel {
    pub fn new(
        efficiency: f64,
        dark_rate_hz: f64,
        dead_time_ns: f64,
        jitter_sigma_ns: Option<f64>,
    ) -> Result<Self, PhotonError> {
        if !(0.0..=1.0).contains(&efficiency) {
            return Err(PhotonError::InvalidDetector("efficiency must lie in [0, 1]"));
        }
        if !(dark_rate_hz >= 0.0) || !(dead_time_ns >= 0.0) {
            return Err(PhotonError::InvalidDetector(
                "dark rate and dead time must be non-negative",
            ));
        }
        if let Some(j) = jitter_sigma_ns {
            if !(j >= 0.0) {
                return Err(PhotonError::InvalidDetector("jitter must be non-negative"));
            }
        }
        Ok(Self {
            efficiency,
            dark_rate_hz,
            dead_time_ns,
            jitter_sigma_ns,
        })
    }

    pub fn ideal() -> Self {
        Self {
            efficiency: 1.0,
            dark_rate_hz: 0.0,
            dead_time_ns: 0.0,
            jitter_sigma_ns: None,
        }
    }
}

/// Beamsplitter plus the two detector arms of the interferometer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HbtSetup {
    /// Fraction of photons routed to detector A.
    pub splitter_ratio: f64,
    pub detector_a: DetectorModel,
    pub detector_b: DetectorModel,
}

impl HbtSetup {
    pub fn new(
        splitter_ratio: f64,
        detector_a: DetectorModel,
        detector_b: DetectorModel,
    ) -> Result<Self, PhotonError> {
        if !(0.0..=1.0).contains(&splitter_ratio) {
            return Err(PhotonError::InvalidDetector(
                "splitter ratio must lie in [0, 1]",
            ));
        }
        Ok(Self {
            splitter_ratio,
            detector_a,
            detector_b,
        })
    }

    pub fn balanced(detector: DetectorModel) -> Self {
        Self {
            splitter_ratio: 0.5,
            detector_a: detector,
            detector_b: detector,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DetectorId {
    A,
    B,
}

/// Sorted click times of one detector over a run.
#[derive(Debug, Clone, PartialEq)]
pub struct TimestampStream {
    pub detector: DetectorId,
    times_ns: Vec<f64>,
    pub duration_s: f64,
}

impl TimestampStream {
    pub fn new(
        detector: DetectorId,
        times_ns: Vec<f64>,
        duration_s: f64,
    ) -> Result<Self, PhotonError> {
        if !(duration_s > 0.0) {
            return Err(PhotonError::BadDuration);
        }
        for i in 1..times_ns.len() {
            if times_ns[i] <= times_ns[i - 1] {
                return Err(PhotonError::UnsortedTimestamps(i));
            }
        }
        Ok(Self {
            detector,
            times_ns,
            duration_s,
        })
    }

    pub fn times_ns(&self) -> &[f64] {
        &self.times_ns
    }

    pub fn len(&self) -> usize {
        self.times_ns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times_ns.is_empty()
    }

    /// Mean click rate in Hz.
    pub fn rate_hz(&self) -> f64 {
        self.times_ns.len() as f64 / self.duration_s
    }
}

/// Binned pair time differences τ = t_B − t_A over a symmetric window.
///
/// Bin k covers [−τ_max + k·Δ, −τ_max + (k+1)·Δ); the window is an integer
/// number of pulse periods so side peaks sit on the bin-center lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct CoincidenceHistogram {
    pub bin_width_ns: f64,
    pub tau_max_ns: f64,
    pub counts: Vec<u64>,
    pub pulse_period_ns: f64,
    pub duration_s: f64,
}

impl CoincidenceHistogram {
    pub fn num_bins(&self) -> usize {
        self.counts.len()
    }

    /// Center of bin `k` in ns.
    pub fn tau_at(&self, k: usize) -> f64 {
        -self.tau_max_ns + (k as f64 + 0.5) * self.bin_width_ns
    }

    pub fn total_counts(&self) -> u64 {
        self.counts.iter().sum()
    }
}
