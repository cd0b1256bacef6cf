//! `qdot hbt-sim`: Monte Carlo pulsed-emitter run through the interferometer,
//! emitting a timestamp file. `qdot g2`: correlate a timestamp file and
//! extract g²(0).

use std::path::PathBuf;

use clap::Args;

use qdot_core::photon::{
    correlate, estimate_g2, fit_histogram, BackgroundEstimate, CorrelationConfig, DetectorModel,
    EmitterModel, HbtSetup, SaturationLaw, SourceStatistics,
};

use super::Ctx;
use crate::config::{resolve, resolve_opt};
use crate::error::CliError;
use crate::formats::{histogram_csv::HistogramFile, read_file, tags::TagsFile, Metadata};
use crate::parallel::simulate_parallel;
use crate::report::{G2Report, HbtReport};
use crate::svg::{line_chart, Series};

#[derive(Debug, Args)]
pub struct HbtSimArgs {
    /// Number of excitation pulses [default: 1000000]
    #[arg(long)]
    pub pulses: Option<u64>,
    /// Pulse period in ns [default: 12.5]
    #[arg(long)]
    pub period_ns: Option<f64>,
    /// Emitter lifetime in ns [default: 1]
    #[arg(long)]
    pub lifetime_ns: Option<f64>,
    /// Single-excitation probability per pulse [default: 1/3]
    #[arg(long)]
    pub p_excite: Option<f64>,
    /// Two-excitation probability per pulse [default: 0]
    #[arg(long)]
    pub p_multi: Option<f64>,
    /// Poissonian reference source with this mean photon number per pulse
    #[arg(long)]
    pub poisson_mean: Option<f64>,
    /// Drive power in nW; sets p-excite through the saturation law
    #[arg(long)]
    pub power_nw: Option<f64>,
    /// Saturation power in nW [default: 30]
    #[arg(long)]
    pub sat_power_nw: Option<f64>,
    /// Saturation law: linear (P/(P+Psat)) or exponential [default: linear]
    #[arg(long)]
    pub sat_law: Option<String>,
    /// Detector efficiency, both arms [default: 0.4]
    #[arg(long)]
    pub efficiency: Option<f64>,
    /// Detector A efficiency override
    #[arg(long)]
    pub efficiency_a: Option<f64>,
    /// Detector B efficiency override
    #[arg(long)]
    pub efficiency_b: Option<f64>,
    /// Dark-count rate in Hz, both arms [default: 100]
    #[arg(long)]
    pub dark_hz: Option<f64>,
    /// Detector A dark rate override
    #[arg(long)]
    pub dark_hz_a: Option<f64>,
    /// Detector B dark rate override
    #[arg(long)]
    pub dark_hz_b: Option<f64>,
    /// Detector dead time in ns [default: 0]
    #[arg(long)]
    pub dead_time_ns: Option<f64>,
    /// Gaussian timing jitter sigma in ns (off when omitted)
    #[arg(long)]
    pub jitter_ns: Option<f64>,
    /// Beamsplitter fraction to detector A [default: 0.5]
    #[arg(long)]
    pub splitter: Option<f64>,
    /// Worker threads; the output is identical for any count [default: 1]
    #[arg(long)]
    pub workers: Option<usize>,
    /// Output base name [default: tags]
    #[arg(long)]
    pub name: Option<String>,
}

pub fn run_sim(args: HbtSimArgs, ctx: &Ctx) -> Result<(), CliError> {
    let cfg = &ctx.config;
    let sec = "hbt-sim";
    let pulses = resolve(args.pulses, cfg, sec, "pulses", 1_000_000)?;
    let period_ns = resolve(args.period_ns, cfg, sec, "period-ns", EmitterModel::DEFAULT_PULSE_PERIOD_NS)?;
    let lifetime_ns = resolve(args.lifetime_ns, cfg, sec, "lifetime-ns", EmitterModel::DEFAULT_LIFETIME_NS)?;
    let p_multi = resolve(args.p_multi, cfg, sec, "p-multi", 0.0)?;
    let poisson_mean = resolve_opt(args.poisson_mean, cfg, sec, "poisson-mean")?;
    let power_nw = resolve_opt(args.power_nw, cfg, sec, "power-nw")?;
    let sat_power_nw = resolve(args.sat_power_nw, cfg, sec, "sat-power-nw", 30.0)?;
    let sat_law = resolve(args.sat_law, cfg, sec, "sat-law", "linear".to_string())?;
    let efficiency = resolve(args.efficiency, cfg, sec, "efficiency", 0.4)?;
    let efficiency_a = resolve(args.efficiency_a, cfg, sec, "efficiency-a", efficiency)?;
    let efficiency_b = resolve(args.efficiency_b, cfg, sec, "efficiency-b", efficiency)?;
    let dark_hz = resolve(args.dark_hz, cfg, sec, "dark-hz", 100.0)?;
    let dark_hz_a = resolve(args.dark_hz_a, cfg, sec, "dark-hz-a", dark_hz)?;
    let dark_hz_b = resolve(args.dark_hz_b, cfg, sec, "dark-hz-b", dark_hz)?;
    let dead_time_ns = resolve(args.dead_time_ns, cfg, sec, "dead-time-ns", 0.0)?;
    let jitter_ns = resolve_opt(args.jitter_ns, cfg, sec, "jitter-ns")?;
    let splitter = resolve(args.splitter, cfg, sec, "splitter", 0.5)?;
    let workers = resolve(args.workers, cfg, sec, "workers", 1)?;
    let name = resolve(args.name, cfg, sec, "name", "tags".to_string())?;

    let law = match sat_law.as_str() {
        "linear" => SaturationLaw::Linear,
        "exponential" => SaturationLaw::Exponential,
        other => {
            return Err(CliError::usage(format!(
                "unknown saturation law {other:?} (expected linear or exponential)"
            )))
        }
    };
    let statistics = match (poisson_mean, power_nw) {
        (Some(mean), _) => SourceStatistics::PoissonianReference { mean_photons: mean },
        (None, Some(p)) => SourceStatistics::Emitter {
            p_excite: (law.p_excite(p, sat_power_nw) - p_multi).max(0.0),
            p_multi,
        },
        (None, None) => SourceStatistics::Emitter {
            p_excite: resolve(args.p_excite, cfg, sec, "p-excite", 1.0 / 3.0)?,
            p_multi,
        },
    };
    let emitter = EmitterModel::new(period_ns, lifetime_ns, statistics)?;
    let detector = |eff: f64, dark: f64| DetectorModel::new(eff, dark, dead_time_ns, jitter_ns);
    let setup = HbtSetup::new(
        splitter,
        detector(efficiency_a, dark_hz_a)?,
        detector(efficiency_b, dark_hz_b)?,
    )?;

    let duration_s = pulses as f64 * period_ns * 1e-9;
    let out = simulate_parallel(&emitter, &setup, duration_s, ctx.seed, workers)?;

    let mut meta = Metadata::default();
    meta.push("seed", ctx.seed);
    meta.push("pulse_period_ns", period_ns);
    meta.push("duration_s", duration_s);
    meta.push("dark_hz_a", dark_hz_a);
    meta.push("dark_hz_b", dark_hz_b);
    let tags = TagsFile::from_streams(&out.a, &out.b, meta);
    ctx.write_csv(&format!("{name}.csv"), &tags.serialize())?;

    let report = HbtReport {
        seed: ctx.seed,
        pulses,
        duration_s,
        clicks_a: out.a.len(),
        clicks_b: out.b.len(),
        emitted_photons: out.photons_per_pulse.iter().map(|&n| n as u64).sum(),
    };
    ctx.write_json(&format!("{name}_report.json"), &report)?;
    Ok(())
}

#[derive(Debug, Args)]
pub struct G2Args {
    /// Input timestamp CSV
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Histogram bin width in ns [default: 0.128]
    #[arg(long)]
    pub bin_ns: Option<f64>,
    /// Correlation window in pulse periods per side [default: 6]
    #[arg(long)]
    pub window_periods: Option<u64>,
    /// Side peaks per side used for normalization [default: 5]
    #[arg(long)]
    pub side_peaks: Option<usize>,
    /// Background estimate: baseline or rates [default: baseline]
    #[arg(long)]
    pub background: Option<String>,
    /// Detector A dark rate in Hz for rates-based background
    #[arg(long)]
    pub dark_hz_a: Option<f64>,
    /// Detector B dark rate in Hz for rates-based background
    #[arg(long)]
    pub dark_hz_b: Option<f64>,
    /// Pulse period override in ns (default: from the tags metadata)
    #[arg(long)]
    pub period_ns: Option<f64>,
    /// Also fit the peak-train histogram model
    #[arg(long)]
    pub fit: bool,
    /// Output base name [default: g2]
    #[arg(long)]
    pub name: Option<String>,
}

pub fn run_g2(args: G2Args, ctx: &Ctx) -> Result<(), CliError> {
    let cfg = &ctx.config;
    let sec = "g2";
    let input = resolve_opt(args.input, cfg, sec, "input")?
        .ok_or_else(|| CliError::usage("g2 requires --input"))?;
    let bin_ns = resolve(args.bin_ns, cfg, sec, "bin-ns", 0.128)?;
    let window_periods = resolve(args.window_periods, cfg, sec, "window-periods", 6)?;
    let side_peaks = resolve(args.side_peaks, cfg, sec, "side-peaks", 5)?;
    let background = resolve(args.background, cfg, sec, "background", "baseline".to_string())?;
    let name = resolve(args.name, cfg, sec, "name", "g2".to_string())?;
    let do_fit = args.fit || cfg.get(sec, "fit").is_some_and(|v| v == "true");

    let tags = TagsFile::parse(&read_file(&input)?, &input)?;
    let period_ns = match resolve_opt(args.period_ns, cfg, sec, "period-ns")? {
        Some(p) => p,
        None => tags.pulse_period_ns().ok_or_else(|| {
            CliError::usage("tags file carries no pulse_period_ns; pass --period-ns")
        })?,
    };
    let (a, b) = tags.to_streams()?;

    let corr = CorrelationConfig {
        bin_width_ns: bin_ns,
        tau_max_ns: window_periods as f64 * period_ns,
        exclude_identical_times: false,
    };
    let histogram = correlate(&a, &b, period_ns, &corr)?;

    let bg = match background.as_str() {
        "baseline" => BackgroundEstimate::FromBaseline,
        "rates" => {
            let from_meta = |key: &str| tags.metadata.get_f64(key);
            let dark_a = resolve_opt(args.dark_hz_a, cfg, sec, "dark-hz-a")?
                .or_else(|| from_meta("dark_hz_a"))
                .ok_or_else(|| CliError::usage("rates background needs --dark-hz-a"))?;
            let dark_b = resolve_opt(args.dark_hz_b, cfg, sec, "dark-hz-b")?
                .or_else(|| from_meta("dark_hz_b"))
                .ok_or_else(|| CliError::usage("rates background needs --dark-hz-b"))?;
            BackgroundEstimate::FromRates {
                dark_rate_a_hz: dark_a,
                dark_rate_b_hz: dark_b,
            }
        }
        other => {
            return Err(CliError::usage(format!(
                "unknown background mode {other:?} (expected baseline or rates)"
            )))
        }
    };
    let g2 = estimate_g2(&histogram, side_peaks, bg)?;
    let fit = if do_fit {
        Some(fit_histogram(&histogram)?)
    } else {
        None
    };

    let mut meta = Metadata::default();
    meta.push("seed", ctx.seed);
    let hist_file = HistogramFile::from_histogram(&histogram, meta);
    ctx.write_csv(&format!("{name}.csv"), &hist_file.serialize())?;
    let report = G2Report::new(ctx.seed, &g2, fit.as_ref());
    ctx.write_json(&format!("{name}_report.json"), &report)?;

    let pts: Vec<(f64, f64)> = hist_file
        .rows
        .iter()
        .map(|&(tau, c)| (tau, c as f64))
        .collect();
    ctx.write_svg(
        &format!("{name}.svg"),
        &line_chart(
            "coincidence histogram",
            "tau (ns)",
            "coincidences",
            &[Series {
                points: &pts,
                color: "#1f77b4",
                label: "coincidences",
            }],
        ),
    )?;
    Ok(())
}
