//! Full cross-correlation of two click streams into a coincidence histogram.

use alloc::vec;

use super::{CoincidenceHistogram, PhotonError, TimestampStream};

/// Histogram geometry. The window must be an integer multiple of the pulse
/// period so peak-integration windows tile exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationConfig {
    pub bin_width_ns: f64,
    pub tau_max_ns: f64,
    /// Drop pairs with bit-identical times. Only meaningful when a stream is
    /// correlated against itself, where every click pairs with itself at
    /// exactly τ = 0; distinct streams are unaffected.
    pub exclude_identical_times: bool,
}

impl CorrelationConfig {
    /// 128 ps bins over ±6 pulse periods.
    pub fn default_for_period(pulse_period_ns: f64) -> Self {
        Self {
            bin_width_ns: 0.128,
            tau_max_ns: 6.0 * pulse_period_ns,
            exclude_identical_times: false,
        }
    }
}

/// Histograms every A–B pair with |t_B − t_A| ≤ τ_max (full correlation, not
/// start–stop). τ = t_B − t_A; bin k covers [−τ_max + kΔ, −τ_max + (k+1)Δ),
/// with τ = +τ_max folded into the last bin.
pub fn correlate(
    a: &TimestampStream,
    b: &TimestampStream,
    pulse_period_ns: f64,
    cfg: &CorrelationConfig,
) -> Result<CoincidenceHistogram, PhotonError> {
    let periods = cfg.tau_max_ns / pulse_period_ns;
    if !(cfg.tau_max_ns > 0.0) || libm::fabs(periods - libm::round(periods)) > 1e-6 {
        return Err(PhotonError::TauMaxNotPeriodMultiple);
    }
    if !(cfg.bin_width_ns > 0.0) || cfg.bin_width_ns > 2.0 * cfg.tau_max_ns {
        return Err(PhotonError::BadBinWidth);
    }
    let n_bins = libm::ceil(2.0 * cfg.tau_max_ns / cfg.bin_width_ns - 1e-9) as usize;
    let mut counts = vec![0u64; n_bins];

    let ta = a.times_ns();
    let tb = b.times_ns();
    let mut j_lo = 0usize;
    for &t in ta {
        while j_lo < tb.len() && tb[j_lo] < t - cfg.tau_max_ns {
            j_lo += 1;
        }
        let mut j = j_lo;
        while j < tb.len() && tb[j] <= t + cfg.tau_max_ns {
            let tau = tb[j] - t;
            j += 1;
            if cfg.exclude_identical_times && tau == 0.0 {
                continue;
            }
            let k = ((tau + cfg.tau_max_ns) / cfg.bin_width_ns) as usize;
            counts[k.min(n_bins - 1)] += 1;
        }
    }

    Ok(CoincidenceHistogram {
        bin_width_ns: cfg.bin_width_ns,
        tau_max_ns: cfg.tau_max_ns,
        counts,
        pulse_period_ns,
        duration_s: a.duration_s.min(b.duration_s),
    })
}

/// Reference O(n²) pair counter over the same window and self-pair rule.
pub fn naive_pair_count(
    a: &TimestampStream,
    b: &TimestampStream,
    tau_max_ns: f64,
    exclude_identical_times: bool,
) -> u64 {
    let mut n = 0u64;
    for &x in a.times_ns() {
        for &y in b.times_ns() {
            let tau = y - x;
            if exclude_identical_times && tau == 0.0 {
                continue;
            }
            if libm::fabs(tau) <= tau_max_ns {
                n += 1;
            }
        }
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::sampling;
    use crate::photon::DetectorId;
    use alloc::vec::Vec;

    fn stream(id: DetectorId, times: &[f64]) -> TimestampStream {
        TimestampStream::new(id, times.to_vec(), 1.0).unwrap()
    }

    #[test]
    fn single_pair_lands_in_expected_bin() {
        let a = stream(DetectorId::A, &[0.0]);
        let b = stream(DetectorId::B, &[5.0]);
        let cfg = CorrelationConfig {
            bin_width_ns: 1.0,
            tau_max_ns: 12.5,
            exclude_identical_times: false,
        };
        let h = correlate(&a, &b, 12.5, &cfg).unwrap();
        assert_eq!(h.total_counts(), 1);
        // τ = +5 with τ_max = 12.5: bin floor((5 + 12.5)/1) = 17 covers [4.5, 5.5)
        let k = h.counts.iter().position(|&c| c > 0).unwrap();
        assert_eq!(k, 17);
        assert!(h.tau_at(k) > 4.0 && h.tau_at(k) < 6.0);
    }

    #[test]
    fn window_must_be_period_multiple() {
        let a = stream(DetectorId::A, &[0.0]);
        let b = stream(DetectorId::B, &[1.0]);
        let cfg = CorrelationConfig {
            bin_width_ns: 1.0,
            tau_max_ns: 30.0,
            exclude_identical_times: false,
        };
        assert_eq!(
            correlate(&a, &b, 12.5, &cfg),
            Err(PhotonError::TauMaxNotPeriodMultiple)
        );
    }

    #[test]
    fn unsorted_streams_rejected_at_construction() {
        assert_eq!(
            TimestampStream::new(DetectorId::A, alloc::vec![3.0, 1.0], 1.0),
            Err(PhotonError::UnsortedTimestamps(1))
        );
    }

    #[test]
    fn self_pairs_excluded_or_included_per_flag() {
        let times = [0.0, 7.0, 26.0];
        let s = stream(DetectorId::A, &times);
        let mut cfg = CorrelationConfig {
            bin_width_ns: 0.5,
            tau_max_ns: 12.5,
            exclude_identical_times: false,
        };
        let with_self = correlate(&s, &s, 12.5, &cfg).unwrap();
        cfg.exclude_identical_times = true;
        let without = correlate(&s, &s, 12.5, &cfg).unwrap();
        // three self-pairs at τ = 0 drop out
        assert_eq!(with_self.total_counts() - without.total_counts(), 3);
        assert_eq!(
            naive_pair_count(&s, &s, 12.5, true),
            without.total_counts()
        );
    }

    #[test]
    fn conservation_against_naive_counter_on_random_streams() {
        // every pair inside the window is binned exactly once
        for seed in 0..50u64 {
            let mut rng = sampling::stream_rng(seed, 0);
            let make = |rng: &mut sampling::ChaCha8Rng, n: usize| -> Vec<f64> {
                let mut t: Vec<f64> = (0..n)
                    .map(|_| sampling::uniform(rng) * 2000.0)
                    .collect();
                t.sort_by(f64::total_cmp);
                t.dedup();
                t
            };
            let na = 1 + (sampling::uniform(&mut rng) * 400.0) as usize;
            let nb = 1 + (sampling::uniform(&mut rng) * 400.0) as usize;
            let a = stream(DetectorId::A, &make(&mut rng, na));
            let b = stream(DetectorId::B, &make(&mut rng, nb));
            let cfg = CorrelationConfig {
                bin_width_ns: 0.128,
                tau_max_ns: 75.0,
                exclude_identical_times: false,
            };
            let h = correlate(&a, &b, 12.5, &cfg).unwrap();
            let naive = naive_pair_count(&a, &b, 75.0, false);
            assert_eq!(h.total_counts(), naive, "seed {seed}");
        }
    }
}
