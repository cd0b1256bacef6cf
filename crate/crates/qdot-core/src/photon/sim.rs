//! Monte Carlo click-stream generation.
//!
//! The pulse train is cut into fixed-size blocks; each block draws from its
//! own counter-derived random substreams, so the assembled result is
//! bit-identical however the blocks are computed — serially here, or spread
//! over worker threads by a caller. Dead-time filtering runs globally after
//! the merge because it couples clicks across block boundaries.

use alloc::vec::Vec;

use super::{
    DetectorId, DetectorModel, EmitterModel, HbtSetup, PhotonError, SourceStatistics,
    TimestampStream,
};
use crate::numeric::sampling::{self, ChaCha8Rng};

/// Pulses per simulation block.
pub const BLOCK_PULSES: u64 = 1 << 16;

/// Random-substream channels per block (emission, darks A, darks B).
const STREAMS_PER_BLOCK: u64 = 4;

/// One contiguous chunk of the pulse train.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PulseBlock {
    pub index: u64,
    pub first_pulse: u64,
    pub num_pulses: u64,
}

/// Raw clicks of one block, before dead-time filtering.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockOutput {
    pub index: u64,
    pub a_times_ns: Vec<f64>,
    pub b_times_ns: Vec<f64>,
    pub photons_per_pulse: Vec<u8>,
}

/// Simulated click streams plus the per-pulse emitted photon counts (the
/// ground truth behind the detectors, kept for estimator cross-checks).
#[derive(Debug, Clone, PartialEq)]
pub struct SimOutput {
    pub a: TimestampStream,
    pub b: TimestampStream,
    pub photons_per_pulse: Vec<u8>,
}

impl SimOutput {
    pub fn total_clicks(&self) -> usize {
        self.a.len() + self.b.len()
    }
}

/// Block decomposition of an `n_pulses` train.
pub fn pulse_blocks(n_pulses: u64) -> Vec<PulseBlock> {
    let mut blocks = Vec::new();
    let mut first = 0u64;
    let mut index = 0u64;
    while first < n_pulses {
        let num = BLOCK_PULSES.min(n_pulses - first);
        blocks.push(PulseBlock {
            index,
            first_pulse: first,
            num_pulses: num,
        });
        first += num;
        index += 1;
    }
    blocks
}

/// Simulates one block of pulses: emission, beamsplitter routing, detection
/// thinning, dark counts, and optional timing jitter. Pure in (config, seed,
/// block); no cross-block state.
pub fn simulate_block(
    emitter: &EmitterModel,
    setup: &HbtSetup,
    duration_ns: f64,
    block: PulseBlock,
    master_seed: u64,
) -> BlockOutput {
    let period = emitter.pulse_period_ns;
    let mut emission_rng = sampling::stream_rng(master_seed, block.index * STREAMS_PER_BLOCK);
    let mut a_times = Vec::new();
    let mut b_times = Vec::new();
    let mut photons_per_pulse = Vec::with_capacity(block.num_pulses as usize);

    for k in 0..block.num_pulses {
        let pulse_time = (block.first_pulse + k) as f64 * period;
        let n_photons = match emitter.statistics {
            SourceStatistics::Emitter { p_excite, p_multi } => {
                let u = sampling::uniform(&mut emission_rng);
                if u < p_multi {
                    2
                } else if u < p_multi + p_excite {
                    1
                } else {
                    0
                }
            }
            SourceStatistics::PoissonianReference { mean_photons } => {
                sampling::poisson(&mut emission_rng, mean_photons).min(255) as u32
            }
        };
        photons_per_pulse.push(n_photons.min(255) as u8);

        let mut last_emission = pulse_time;
        for _ in 0..n_photons {
            let emission_time = match emitter.statistics {
                // re-excitation: the second photon decays after the first
                SourceStatistics::Emitter { .. } => {
                    last_emission += sampling::exponential(&mut emission_rng, emitter.lifetime_ns);
                    last_emission
                }
                // reference photons decay independently of each other
                SourceStatistics::PoissonianReference { .. } => {
                    pulse_time + sampling::exponential(&mut emission_rng, emitter.lifetime_ns)
                }
            };
            let to_a = sampling::uniform(&mut emission_rng) < setup.splitter_ratio;
            let det = if to_a { &setup.detector_a } else { &setup.detector_b };
            let detected = sampling::uniform(&mut emission_rng) < det.efficiency;
            if !detected {
                continue;
            }
            let mut t = emission_time;
            if let Some(sigma) = det.jitter_sigma_ns {
                if sigma > 0.0 {
                    t += sigma * sampling::standard_normal(&mut emission_rng);
                }
            }
            if t >= duration_ns || t < 0.0 {
                continue;
            }
            if to_a {
                a_times.push(t);
            } else {
                b_times.push(t);
            }
        }
    }

    let block_start = block.first_pulse as f64 * period;
    let block_end = ((block.first_pulse + block.num_pulses) as f64 * period).min(duration_ns);
    let mut dark_rng_a =
        sampling::stream_rng(master_seed, block.index * STREAMS_PER_BLOCK + 1);
    let mut dark_rng_b =
        sampling::stream_rng(master_seed, block.index * STREAMS_PER_BLOCK + 2);
    append_dark_clicks(
        &mut dark_rng_a,
        &setup.detector_a,
        block_start,
        block_end,
        &mut a_times,
    );
    append_dark_clicks(
        &mut dark_rng_b,
        &setup.detector_b,
        block_start,
        block_end,
        &mut b_times,
    );

    BlockOutput {
        index: block.index,
        a_times_ns: a_times,
        b_times_ns: b_times,
        photons_per_pulse,
    }
}

/// Homogeneous Poisson dark clicks on [start, end), by exponential gaps.
fn append_dark_clicks(
    rng: &mut ChaCha8Rng,
    det: &DetectorModel,
    start_ns: f64,
    end_ns: f64,
    out: &mut Vec<f64>,
) {
    if det.dark_rate_hz <= 0.0 {
        return;
    }
    let mean_gap_ns = 1e9 / det.dark_rate_hz;
    let mut t = start_ns;
    loop {
        t += sampling::exponential(rng, mean_gap_ns);
        if t >= end_ns {
            break;
        }
        out.push(t);
    }
}

/// Merges block outputs (in index order) into per-detector streams: global
/// sort, exact-duplicate removal, then dead-time filtering per detector.
pub fn assemble_streams(
    setup: &HbtSetup,
    duration_s: f64,
    blocks: Vec<BlockOutput>,
) -> Result<SimOutput, PhotonError> {
    let mut a_all = Vec::new();
    let mut b_all = Vec::new();
    let mut photons_per_pulse = Vec::new();
    let mut expect = 0u64;
    for block in blocks {
        debug_assert_eq!(block.index, expect, "blocks must arrive in index order");
        expect += 1;
        a_all.extend_from_slice(&block.a_times_ns);
        b_all.extend_from_slice(&block.b_times_ns);
        photons_per_pulse.extend_from_slice(&block.photons_per_pulse);
    }
    let a = finalize_detector(DetectorId::A, a_all, &setup.detector_a, duration_s)?;
    let b = finalize_detector(DetectorId::B, b_all, &setup.detector_b, duration_s)?;
    Ok(SimOutput {
        a,
        b,
        photons_per_pulse,
    })
}

fn finalize_detector(
    id: DetectorId,
    mut times: Vec<f64>,
    det: &DetectorModel,
    duration_s: f64,
) -> Result<TimestampStream, PhotonError> {
    times.sort_by(f64::total_cmp);
    let mut kept = Vec::with_capacity(times.len());
    let mut last = f64::NEG_INFINITY;
    for t in times {
        let gap = t - last;
        if gap <= 0.0 {
            continue; // exact duplicate
        }
        if det.dead_time_ns > 0.0 && gap < det.dead_time_ns {
            continue;
        }
        kept.push(t);
        last = t;
    }
    TimestampStream::new(id, kept, duration_s)
}

/// Full run: simulate every block serially and assemble. Identical output to
/// any block-parallel evaluation with the same seed.
pub fn simulate_streams(
    emitter: &EmitterModel,
    setup: &HbtSetup,
    duration_s: f64,
    master_seed: u64,
) -> Result<SimOutput, PhotonError> {
    if !(duration_s > 0.0) {
        return Err(PhotonError::BadDuration);
    }
    let duration_ns = duration_s * 1e9;
    let n_pulses = (duration_ns / emitter.pulse_period_ns) as u64;
    let blocks = pulse_blocks(n_pulses)
        .into_iter()
        .map(|b| simulate_block(emitter, setup, duration_ns, b, master_seed))
        .collect();
    assemble_streams(setup, duration_s, blocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::photon::SaturationLaw;

    fn emitter(p_excite: f64, p_multi: f64) -> EmitterModel {
        EmitterModel::new(12.5, 1.0, SourceStatistics::Emitter { p_excite, p_multi }).unwrap()
    }

    fn duration_for_pulses(n: u64) -> f64 {
        n as f64 * 12.5e-9
    }

    #[test]
    fn click_conservation_without_losses() {
        // unit efficiency, no darks, no multi: clicks across both detectors
        // match the excitation probability
        let e = emitter(0.4, 0.0);
        let setup = HbtSetup::balanced(DetectorModel::ideal());
        let n = 200_000u64;
        let out = simulate_streams(&e, &setup, duration_for_pulses(n), 42).unwrap();
        let clicks = out.total_clicks() as f64;
        let expect = 0.4 * n as f64;
        let sigma = libm::sqrt(n as f64 * 0.4 * 0.6);
        assert!(
            (clicks - expect).abs() < 3.0 * sigma,
            "clicks {clicks} vs {expect}"
        );
        // truth record matches the streams
        let emitted: u64 = out.photons_per_pulse.iter().map(|&c| c as u64).sum();
        assert!(clicks as u64 <= emitted);
    }

    #[test]
    fn same_seed_bit_identical() {
        let e = emitter(0.3, 0.01);
        let d = DetectorModel::new(0.4, 150.0, 22.0, None).unwrap();
        let setup = HbtSetup::balanced(d);
        let o1 = simulate_streams(&e, &setup, 2e-3, 7).unwrap();
        let o2 = simulate_streams(&e, &setup, 2e-3, 7).unwrap();
        assert_eq!(o1, o2);
        let o3 = simulate_streams(&e, &setup, 2e-3, 8).unwrap();
        assert_ne!(o1.a.times_ns(), o3.a.times_ns());
    }

    #[test]
    fn blockwise_equals_serial() {
        // assembling externally simulated blocks reproduces the serial run,
        // regardless of the order blocks were computed in
        let e = emitter(0.5, 0.02);
        let d = DetectorModel::new(0.6, 300.0, 0.0, None).unwrap();
        let setup = HbtSetup::balanced(d);
        let duration_s = duration_for_pulses(3 * BLOCK_PULSES + 1234);
        let duration_ns = duration_s * 1e9;
        let n_pulses = (duration_ns / e.pulse_period_ns) as u64;

        let serial = simulate_streams(&e, &setup, duration_s, 99).unwrap();

        let mut blocks = pulse_blocks(n_pulses);
        blocks.reverse();
        let mut outs: Vec<BlockOutput> = blocks
            .into_iter()
            .map(|b| simulate_block(&e, &setup, duration_ns, b, 99))
            .collect();
        outs.sort_by_key(|b| b.index);
        let assembled = assemble_streams(&setup, duration_s, outs).unwrap();
        assert_eq!(serial, assembled);
    }

    #[test]
    fn no_multi_photon_pulses_when_p_multi_zero() {
        let e = emitter(0.9, 0.0);
        let setup = HbtSetup::balanced(DetectorModel::ideal());
        let out = simulate_streams(&e, &setup, duration_for_pulses(50_000), 3).unwrap();
        assert!(out.photons_per_pulse.iter().all(|&n| n <= 1));
    }

    #[test]
    fn dark_rate_produces_expected_click_count() {
        let e = emitter(0.0, 0.0);
        let d = DetectorModel::new(1.0, 5000.0, 0.0, None).unwrap();
        let setup = HbtSetup::balanced(d);
        let duration = 2.0;
        let out = simulate_streams(&e, &setup, duration, 11).unwrap();
        let expect = 5000.0 * duration;
        for s in [&out.a, &out.b] {
            let got = s.len() as f64;
            assert!(
                (got - expect).abs() < 4.0 * libm::sqrt(expect),
                "dark clicks {got} vs {expect}"
            );
        }
    }

    #[test]
    fn dead_time_enforces_minimum_gap() {
        let e = emitter(0.95, 0.0);
        let d = DetectorModel::new(1.0, 50_000.0, 30.0, None).unwrap();
        let setup = HbtSetup::balanced(d);
        let out = simulate_streams(&e, &setup, 1e-3, 5).unwrap();
        for s in [&out.a, &out.b] {
            for w in s.times_ns().windows(2) {
                assert!(w[1] - w[0] >= 30.0);
            }
        }
    }

    #[test]
    fn poissonian_mode_mean_photons() {
        let e = EmitterModel::new(
            12.5,
            1.0,
            SourceStatistics::PoissonianReference { mean_photons: 0.8 },
        )
        .unwrap();
        let setup = HbtSetup::balanced(DetectorModel::ideal());
        let n = 100_000u64;
        let out = simulate_streams(&e, &setup, duration_for_pulses(n), 21).unwrap();
        let emitted: u64 = out.photons_per_pulse.iter().map(|&c| c as u64).sum();
        let expect = 0.8 * n as f64;
        assert!(
            (emitted as f64 - expect).abs() < 4.0 * libm::sqrt(expect),
            "emitted {emitted}"
        );
    }

    #[test]
    fn model_validation() {
        assert!(EmitterModel::new(0.0, 1.0, SourceStatistics::Emitter { p_excite: 0.5, p_multi: 0.0 }).is_err());
        assert!(EmitterModel::new(12.5, 1.0, SourceStatistics::Emitter { p_excite: 0.8, p_multi: 0.3 }).is_err());
        assert!(DetectorModel::new(1.2, 0.0, 0.0, None).is_err());
        assert!(HbtSetup::new(1.5, DetectorModel::ideal(), DetectorModel::ideal()).is_err());
        // 50% of saturation power maps to p = 1/3 under the linear law
        let p = SaturationLaw::Linear.p_excite(15.0, 30.0);
        assert!((p - 1.0 / 3.0).abs() < 1e-12);
    }
}
