//! g²(0) extraction from coincidence histograms.
//!
//! The point estimate is the ratio of the τ=0 peak area to the average side
//! peak area, each integrated over one full pulse period and background
//! subtracted. A one-sided 95% Poisson bound on the raw center count
//! propagates to an upper bound on g²(0).

use alloc::vec::Vec;

use super::{CoincidenceHistogram, PhotonError};
use crate::numeric::lm::{self, LmOptions};
use crate::numeric::special::poisson_upper_bound;

/// How the flat accidental background per bin is estimated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BackgroundEstimate {
    /// From configured dark-count rates: rate_A·rate_B·bin·duration per bin
    /// (dark–dark accidentals only).
    FromRates {
        dark_rate_a_hz: f64,
        dark_rate_b_hz: f64,
    },
    /// Median of the inter-peak baseline bins; captures dark–dark and
    /// photon–dark accidentals alike.
    FromBaseline,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum G2Warning {
    /// The background-subtracted center area came out negative and was
    /// clamped to zero.
    NegativeCenterClamped,
    /// Side-peak areas vary by more than 20% (drift/bleaching indicator).
    SidePeakVariation { relative_spread: f64 },
}

/// g²(0) estimate with statistical bound and purity.
#[derive(Debug, Clone, PartialEq)]
pub struct G2Result {
    pub g2_zero: f64,
    /// One-sided 95% upper bound.
    pub upper_bound: f64,
    /// √(1 − g²(0)); None when g²(0) > 1.
    pub purity: Option<f64>,
    /// Background-subtracted side-peak areas, ordered by peak index
    /// −n..−1, 1..n.
    pub side_peak_areas: Vec<f64>,
    pub background_per_bin: f64,
    pub warnings: Vec<G2Warning>,
}

/// Integrates the τ=0 peak and `n_side_peaks` side peaks per side, subtracts
/// the background, and forms g²(0) = area₀ / mean(side areas).
pub fn estimate_g2(
    h: &CoincidenceHistogram,
    n_side_peaks: usize,
    background: BackgroundEstimate,
) -> Result<G2Result, PhotonError> {
    if n_side_peaks < 2 {
        return Err(PhotonError::TooFewSidePeaks(n_side_peaks));
    }
    let period = h.pulse_period_ns;
    // a peak window is [kT − T/2, kT + T/2); the outermost full window must
    // fit inside the histogram
    let available = libm::floor(h.tau_max_ns / period + 0.5 - 1e-9) as i64 - 1;
    let available = available.max(0) as usize;
    if available < n_side_peaks {
        return Err(PhotonError::InsufficientWindow {
            needed: n_side_peaks,
            available,
        });
    }

    let background_per_bin = match background {
        BackgroundEstimate::FromRates {
            dark_rate_a_hz,
            dark_rate_b_hz,
        } => dark_rate_a_hz * dark_rate_b_hz * (h.bin_width_ns * 1e-9) * h.duration_s,
        BackgroundEstimate::FromBaseline => baseline_median(h),
    };

    let window = |k: i64| -> (f64, usize) {
        let center = k as f64 * period;
        let mut raw = 0.0;
        let mut bins = 0usize;
        for (i, &c) in h.counts.iter().enumerate() {
            let tau = h.tau_at(i);
            if tau >= center - 0.5 * period && tau < center + 0.5 * period {
                raw += c as f64;
                bins += 1;
            }
        }
        (raw, bins)
    };

    let mut side_peak_areas = Vec::with_capacity(2 * n_side_peaks);
    let mut ks: Vec<i64> = (-(n_side_peaks as i64)..=-1).collect();
    ks.extend(1..=n_side_peaks as i64);
    for &k in &ks {
        let (raw, bins) = window(k);
        side_peak_areas.push(raw - background_per_bin * bins as f64);
    }
    let mean_side = side_peak_areas.iter().sum::<f64>() / side_peak_areas.len() as f64;
    if !(mean_side > 0.0) {
        return Err(PhotonError::DegenerateHistogram);
    }

    let (raw0, bins0) = window(0);
    let bg0 = background_per_bin * bins0 as f64;
    let mut warnings = Vec::new();
    let mut area0 = raw0 - bg0;
    if area0 < 0.0 {
        area0 = 0.0;
        warnings.push(G2Warning::NegativeCenterClamped);
    }

    let min_side = side_peak_areas.iter().copied().fold(f64::INFINITY, f64::min);
    let max_side = side_peak_areas
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let relative_spread = (max_side - min_side) / mean_side;
    if relative_spread > 0.20 {
        warnings.push(G2Warning::SidePeakVariation { relative_spread });
    }

    let g2_zero = area0 / mean_side;
    let raw0_bound = poisson_upper_bound(raw0 as u64, 0.95);
    let upper_bound = ((raw0_bound - bg0) / mean_side).max(g2_zero);
    let purity = if g2_zero <= 1.0 {
        Some(libm::sqrt(1.0 - g2_zero))
    } else {
        None
    };

    Ok(G2Result {
        g2_zero,
        upper_bound,
        purity,
        side_peak_areas,
        background_per_bin,
        warnings,
    })
}

/// Median of bins at least 0.4 periods away from every peak center. This
/// estimates the flat accidental floor; it assumes the exponential peak
/// tails have decayed by mid-period, which holds for lifetimes well below
/// the pulse period.
fn baseline_median(h: &CoincidenceHistogram) -> f64 {
    let period = h.pulse_period_ns;
    let mut baseline: Vec<f64> = (0..h.num_bins())
        .filter_map(|i| {
            let tau = h.tau_at(i);
            let frac = libm::fabs(tau / period - libm::round(tau / period));
            (frac > 0.4).then_some(h.counts[i] as f64)
        })
        .collect();
    if baseline.is_empty() {
        return 0.0;
    }
    baseline.sort_by(f64::total_cmp);
    let n = baseline.len();
    if n % 2 == 1 {
        baseline[n / 2]
    } else {
        0.5 * (baseline[n / 2 - 1] + baseline[n / 2])
    }
}

/// Single-photon purity √(1 − g²(0)).
pub fn purity(g2_zero: f64) -> Result<f64, PhotonError> {
    if !(0.0..=1.0).contains(&g2_zero) {
        return Err(PhotonError::PurityDomain(g2_zero));
    }
    Ok(libm::sqrt(1.0 - g2_zero))
}

/// Histogram model fit: c(τ) = B + Σ_k A_k·exp(−|τ − kT|/τ_d) with one
/// shared side amplitude and a free center amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct HistogramFit {
    pub background: f64,
    pub side_amplitude: f64,
    pub zero_amplitude: f64,
    pub decay_ns: f64,
    /// Alternative estimate: A₀ / A_side.
    pub g2_zero: f64,
    pub rss: f64,
    pub iterations: usize,
}

/// Least-squares fit of the peak-train model to the histogram; returns the
/// amplitude-ratio g²(0) estimate alongside the decay time.
pub fn fit_histogram(h: &CoincidenceHistogram) -> Result<HistogramFit, PhotonError> {
    let period = h.pulse_period_ns;
    let k_max = libm::ceil(h.tau_max_ns / period) as i64 + 1;

    // seeds from simple histogram features
    let b0 = baseline_median(h);
    let center_bin = ((h.tau_max_ns) / h.bin_width_ns) as usize;
    let peak_max = h.counts.iter().copied().fold(0u64, u64::max) as f64;
    let a_side0 = (peak_max - b0).max(1.0);
    let a_zero0 = (h.counts[center_bin.min(h.num_bins() - 1)] as f64 - b0).max(0.0);
    let tau_d0 = period / 10.0;

    let taus: Vec<f64> = (0..h.num_bins()).map(|i| h.tau_at(i)).collect();
    let counts: Vec<f64> = h.counts.iter().map(|&c| c as f64).collect();
    let model = |p: &[f64], tau: f64| -> f64 {
        let (b, a_side, a_zero, tau_d) = (p[0], p[1], p[2], p[3]);
        let mut v = b;
        for k in -k_max..=k_max {
            let a = if k == 0 { a_zero } else { a_side };
            if a > 0.0 {
                v += a * libm::exp(-libm::fabs(tau - k as f64 * period) / tau_d);
            }
        }
        v
    };
    let residuals = |p: &[f64], out: &mut [f64]| {
        for (i, (&tau, &c)) in taus.iter().zip(&counts).enumerate() {
            out[i] = model(p, tau) - c;
        }
    };
    let bounds = [
        (0.0, f64::INFINITY),
        (0.0, f64::INFINITY),
        (0.0, f64::INFINITY),
        (h.bin_width_ns * 0.1, 100.0 * period),
    ];
    let opts = LmOptions {
        max_iterations: 400,
        ftol: 1e-9,
        ..LmOptions::default()
    };
    let fit = lm::fit(
        residuals,
        &[b0, a_side0, a_zero0, tau_d0],
        taus.len(),
        Some(&bounds),
        &opts,
    );

    let result = HistogramFit {
        background: fit.params[0],
        side_amplitude: fit.params[1],
        zero_amplitude: fit.params[2],
        decay_ns: fit.params[3],
        g2_zero: if fit.params[1] > 0.0 {
            fit.params[2] / fit.params[1]
        } else {
            f64::NAN
        },
        rss: fit.rss,
        iterations: fit.iterations,
    };
    if !fit.converged {
        return Err(PhotonError::NonConvergence {
            iterations: fit.iterations,
            best: alloc::boxed::Box::new(result),
        });
    }
    Ok(result)
}
