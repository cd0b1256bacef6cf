//! JSON report bodies. Field sets are stable interfaces; serialization is
//! deterministic (fixed field order, shortest-round-trip floats).

use serde::Serialize;

use qdot_core::finestructure::PolarFit;
use qdot_core::lineshape::PeakFit;
use qdot_core::photon::{G2Result, G2Warning, HistogramFit};

#[derive(Debug, Serialize)]
pub struct PeakJson {
    pub center_ev: f64,
    pub fwhm_ev: f64,
    pub area: f64,
    pub center_err: Option<f64>,
    pub fwhm_err: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct FitReport {
    pub seed: u64,
    pub peaks: Vec<PeakJson>,
    pub background: f64,
    pub lambda: f64,
    pub residual: f64,
}

impl FitReport {
    pub fn new(seed: u64, fit: &PeakFit, lambda: f64) -> Self {
        let peaks = fit
            .model
            .peaks()
            .iter()
            .zip(&fit.uncertainties)
            .map(|(p, u)| PeakJson {
                center_ev: p.center.as_ev(),
                fwhm_ev: p.fwhm_ev,
                area: p.area,
                center_err: finite(u.center_err),
                fwhm_err: finite(u.fwhm_err),
            })
            .collect();
        Self {
            seed,
            peaks,
            background: fit.model.background(),
            lambda,
            residual: fit.rss,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct PolarReport {
    pub seed: u64,
    pub beta: f64,
    pub theta_deg: f64,
    pub scale: f64,
    pub ellipticity: f64,
    pub major_axis_deg: f64,
    pub residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta_upper_bound: Option<f64>,
}

impl PolarReport {
    pub fn new(seed: u64, fit: &PolarFit) -> Self {
        Self {
            seed,
            beta: fit.params.beta,
            theta_deg: fit.params.theta_mix.to_degrees(),
            scale: fit.scale,
            ellipticity: fit.ellipticity,
            major_axis_deg: fit.major_axis_deg,
            residual: fit.rss,
            beta_upper_bound: fit.beta_upper_bound,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct HistogramFitJson {
    pub background: f64,
    pub side_amplitude: f64,
    pub zero_amplitude: f64,
    pub decay_ns: f64,
    pub g2_zero: f64,
}

#[derive(Debug, Serialize)]
pub struct G2Report {
    pub seed: u64,
    pub g2_zero: f64,
    pub upper_bound: f64,
    pub purity: Option<f64>,
    pub side_peak_areas: Vec<f64>,
    pub background_per_bin: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<HistogramFitJson>,
}

impl G2Report {
    pub fn new(seed: u64, g2: &G2Result, fit: Option<&HistogramFit>) -> Self {
        Self {
            seed,
            g2_zero: g2.g2_zero,
            upper_bound: g2.upper_bound,
            purity: g2.purity,
            side_peak_areas: g2.side_peak_areas.clone(),
            background_per_bin: g2.background_per_bin,
            warnings: g2
                .warnings
                .iter()
                .map(|w| match w {
                    G2Warning::NegativeCenterClamped => {
                        "negative center area clamped to zero".to_string()
                    }
                    G2Warning::SidePeakVariation { relative_spread } => {
                        format!("side peak areas vary by {relative_spread:.3}")
                    }
                })
                .collect(),
            fit: fit.map(|f| HistogramFitJson {
                background: f.background,
                side_amplitude: f.side_amplitude,
                zero_amplitude: f.zero_amplitude,
                decay_ns: f.decay_ns,
                g2_zero: f.g2_zero,
            }),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct PairJson {
    pub a: [u32; 2],
    pub b: [u32; 2],
    pub de_ev: f64,
}

#[derive(Debug, Serialize)]
pub struct ArrayReport {
    pub seed: u64,
    pub mean_nm: f64,
    pub std_nm: f64,
    pub mean_ev: f64,
    pub std_ev: f64,
    pub min_nm: f64,
    pub max_nm: f64,
    pub threshold_ev: f64,
    pub pairs: Vec<PairJson>,
}

#[derive(Debug, Serialize)]
pub struct HbtReport {
    pub seed: u64,
    pub pulses: u64,
    pub duration_s: f64,
    pub clicks_a: usize,
    pub clicks_b: usize,
    pub emitted_photons: u64,
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

pub fn to_json_string(report: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serialization cannot fail");
    s.push('\n');
    s
}
