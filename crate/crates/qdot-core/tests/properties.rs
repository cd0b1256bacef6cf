//! Property tests over the library invariants.

use proptest::prelude::*;

use qdot_core::finestructure::{
    closed_form_ellipticity, dipoles_from_mixing, extend_polarizer_data, pattern_extrema,
    pattern_intensity, HoleMixingParams, PolarPattern,
};
use qdot_core::lineshape::{
    convolve, fit_peaks, synthesize, InstrumentResponse, LorentzianPeak, Noise, PeakModel,
};
use qdot_core::photon::{correlate, naive_pair_count, purity, CorrelationConfig, DetectorId, TimestampStream};
use qdot_core::spectrum::uniform_axis_ev;
use qdot_core::units::{
    energy_to_wavelength, wavelength_to_energy, PhotonEnergy, Wavelength,
};
use qdot_core::array_map::{find_pairs, synthetic_map};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn energy_wavelength_round_trip(nm in 100.0f64..10_000.0) {
        let w = Wavelength::from_nm(nm).unwrap();
        let back = energy_to_wavelength(wavelength_to_energy(w));
        prop_assert!((back.as_nm() - nm).abs() / nm < 1e-12);
    }

    #[test]
    fn pattern_period_is_180_degrees(
        beta in 0.0f64..0.7,
        gamma in 0.0f64..0.5,
        theta in 0.0f64..core::f64::consts::PI,
        phi in 0.0f64..core::f64::consts::PI,
        angle in 0.0f64..180.0,
    ) {
        prop_assume!(beta * beta + gamma * gamma <= 1.0);
        let p = HoleMixingParams::new(beta, gamma, theta, phi).unwrap();
        let d = dipoles_from_mixing(&p).unwrap();
        let i1 = pattern_intensity(&d, angle);
        let i2 = pattern_intensity(&d, angle + 180.0);
        prop_assert!((i1 - i2).abs() <= 1e-12 * i1.max(1e-300));
    }

    #[test]
    fn ellipticity_oracle_at_gamma_zero(beta in 0.0f64..0.6, theta in 0.0f64..core::f64::consts::PI) {
        let p = HoleMixingParams::new(beta, 0.0, theta, 0.0).unwrap();
        let d = dipoles_from_mixing(&p).unwrap();
        let (max, min, _) = pattern_extrema(&d);
        let e_pattern = max / min;
        let e_formula = closed_form_ellipticity(beta, 0.0).unwrap();
        prop_assert!((e_pattern - e_formula).abs() / e_formula < 1e-9,
            "β={beta} θ={theta}: {e_pattern} vs {e_formula}");
        prop_assert!(e_pattern >= 1.0 - 1e-12);
    }

    #[test]
    fn extend_is_idempotent(step in 5.0f64..30.0, scale in 1.0f64..1e4) {
        let mut angles = vec![];
        let mut a = 0.0;
        while a < 180.0 {
            angles.push(a);
            a += step;
        }
        let intensities: Vec<f64> = angles.iter().map(|x| scale * (1.0 + (x / 37.0).sin().abs())).collect();
        let half = PolarPattern::new(angles, intensities, None).unwrap();
        let once = extend_polarizer_data(&half).unwrap();
        let twice = extend_polarizer_data(&once).unwrap();
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn purity_monotone(a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(purity(lo).unwrap() >= purity(hi).unwrap());
    }

    #[test]
    fn pair_search_matches_brute_force(seed in 0u64..500, threshold_uev in 1.0f64..2000.0) {
        let map = synthetic_map(5, 8, 919.0, 8.0, seed);
        let threshold = threshold_uev * 1e-6;
        let report = find_pairs(&map, threshold).unwrap();

        let entries = map.entries();
        let mut brute = 0usize;
        for i in 0..entries.len() {
            for j in i + 1..entries.len() {
                let de = (wavelength_to_energy(entries[i].wavelength).as_ev()
                    - wavelength_to_energy(entries[j].wavelength).as_ev())
                .abs();
                if de <= threshold {
                    brute += 1;
                }
            }
        }
        prop_assert_eq!(report.pairs.len(), brute);
        for p in &report.pairs {
            prop_assert!(p.de_ev <= threshold);
        }
        // ascending separation
        for w in report.pairs.windows(2) {
            prop_assert!(w[0].de_ev <= w[1].de_ev);
        }
    }

    #[test]
    fn correlation_counts_every_pair_once(seed in 0u64..300) {
        use qdot_core::numeric::sampling;
        let mut rng = sampling::stream_rng(seed, 0);
        let mut make = |n: usize| -> Vec<f64> {
            let mut t: Vec<f64> = (0..n).map(|_| sampling::uniform(&mut rng) * 1500.0).collect();
            t.sort_by(f64::total_cmp);
            t.dedup();
            t
        };
        let a_times = make(1 + (seed % 350) as usize);
        let b_times = make(1 + (seed % 290) as usize);
        let a = TimestampStream::new(DetectorId::A, a_times, 1.0).unwrap();
        let b = TimestampStream::new(DetectorId::B, b_times, 1.0).unwrap();
        let cfg = CorrelationConfig {
            bin_width_ns: 0.128,
            tau_max_ns: 62.5,
            exclude_identical_times: false,
        };
        let h = correlate(&a, &b, 12.5, &cfg).unwrap();
        prop_assert_eq!(h.total_counts(), naive_pair_count(&a, &b, 62.5, false));
    }
}

proptest! {
    // heavier numerical properties get fewer cases
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn width_additivity(g1_uev in 5.0f64..100.0, g2_uev in 5.0f64..100.0) {
        let center = 1.349;
        let peak = LorentzianPeak::new(
            PhotonEnergy::from_ev(center).unwrap(),
            g1_uev * 1e-6,
            5_000.0,
        )
        .unwrap();
        let model = PeakModel::new(vec![peak], 0.0).unwrap();
        let irf = InstrumentResponse::new(g2_uev * 1e-6).unwrap();
        let total = (g1_uev + g2_uev) * 1e-6;
        let half_span = 25.0 * total;
        let spacing = (g2_uev * 1e-6 / 6.0).min(total / 20.0);
        let n = (2.0 * half_span / spacing).ceil() as usize + 1;
        let axis = uniform_axis_ev(center - half_span, center + half_span, n);
        let s = convolve(&model, &irf, &axis, Default::default()).unwrap();
        let fit = fit_peaks(&s, 1, None).unwrap();
        let got = fit.model.peaks()[0].fwhm_ev;
        prop_assert!(
            (got - total).abs() / total < 0.01,
            "Γ1={g1_uev} Γ2={g2_uev}: fitted {got}"
        );
    }

    #[test]
    fn fit_scale_equivariance(scale in 0.1f64..50.0, seed in 0u64..1000) {
        // realistic counting scale: peak density ~3000 over a background of 30
        let fwhm = 25e-6;
        let peak = LorentzianPeak::new(
            PhotonEnergy::from_ev(1.349).unwrap(),
            fwhm,
            3000.0 * core::f64::consts::PI * fwhm / 2.0,
        )
        .unwrap();
        let model = PeakModel::new(vec![peak], 30.0).unwrap();
        let axis = uniform_axis_ev(1.349 - 4e-4, 1.349 + 4e-4, 400);
        let s = synthesize(&model, &axis, Noise::Poisson { seed }, Default::default()).unwrap();
        let scaled = qdot_core::Spectrum::new(
            axis.clone(),
            s.counts().iter().map(|c| c * scale).collect(),
            Default::default(),
        )
        .unwrap();
        let f1 = fit_peaks(&s, 1, None).unwrap();
        let f2 = fit_peaks(&scaled, 1, None).unwrap();
        let (p1, p2) = (f1.model.peaks()[0], f2.model.peaks()[0]);
        prop_assert!((p2.area / p1.area - scale).abs() / scale < 1e-3);
        prop_assert!((p2.center.as_ev() - p1.center.as_ev()).abs() < 1e-9);
        prop_assert!((p2.fwhm_ev - p1.fwhm_ev).abs() / p1.fwhm_ev < 1e-4);
        let b1 = f1.model.background();
        if b1 > 1.0 {
            prop_assert!((f2.model.background() / b1 - scale).abs() / scale < 0.02);
        }
    }
}

#[test]
fn deconvolve_convolve_identity_within_five_percent() {
    // random peak models at signal-to-background ≥ 20: recovered intrinsic
    // spectrum within 5% relative L2 of the true one
    use qdot_core::lineshape::deconvolve;
    use qdot_core::numeric::sampling;

    let irf = InstrumentResponse::default();
    for seed in 0..6u64 {
        let mut rng = sampling::stream_rng(seed, 9);
        let gamma = (8.0 + 30.0 * sampling::uniform(&mut rng)) * 1e-6;
        let area = 40_000.0 + 60_000.0 * sampling::uniform(&mut rng);
        let center = 1.349 + (sampling::uniform(&mut rng) - 0.5) * 1e-4;
        let peak_height = area * 2.0 / (core::f64::consts::PI * gamma);
        let background = (peak_height / 40.0).max(1.0); // SNR ≥ 20 vs background
        let peak = LorentzianPeak::new(PhotonEnergy::from_ev(center).unwrap(), gamma, area).unwrap();
        let model = PeakModel::new(vec![peak], background).unwrap();

        let axis = uniform_axis_ev(center - 3e-4, center + 3e-4, 301);
        let measured = convolve(&model, &irf, &axis, Default::default()).unwrap();
        let noisy = qdot_core::Spectrum::new(
            axis.clone(),
            measured
                .counts()
                .iter()
                .map(|&c| sampling::poisson(&mut rng, c) as f64)
                .collect(),
            Default::default(),
        )
        .unwrap();

        let result = deconvolve(&noisy, &irf, None, Some(1)).unwrap();
        let truth: Vec<f64> = axis.iter().map(|&e| model.density(e)).collect();
        let mut num = 0.0;
        let mut den = 0.0;
        for (got, want) in result.intrinsic.counts().iter().zip(&truth) {
            num += (got - want) * (got - want);
            den += want * want;
        }
        let rel_l2 = (num / den).sqrt();
        assert!(rel_l2 < 0.05, "seed {seed}: relative L2 {rel_l2}");
    }
}
