//! `qdot fit`: multi-peak Lorentzian fit of a spectrum file.
//! `qdot deconv`: instrument-response deconvolution plus intrinsic fit.

use std::path::PathBuf;

use clap::Args;

use qdot_core::lineshape::{deconvolve, fit_peaks, InstrumentResponse};
use qdot_core::units::HC_EV_NM;

use super::Ctx;
use crate::config::{resolve, resolve_opt};
use crate::error::CliError;
use crate::formats::{read_file, spectrum_csv::SpectrumFile, Metadata};
use crate::report::FitReport;
use crate::svg::{line_chart, Series};

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Input spectrum CSV
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Number of peaks to fit [default: 2]
    #[arg(long)]
    pub peaks: Option<usize>,
    /// Output base name [default: fit]
    #[arg(long)]
    pub name: Option<String>,
}

pub fn run_fit(args: FitArgs, ctx: &Ctx) -> Result<(), CliError> {
    let cfg = &ctx.config;
    let input = resolve_opt(args.input, cfg, "fit", "input")?
        .ok_or_else(|| CliError::usage("fit requires --input"))?;
    let peaks = resolve(args.peaks, cfg, "fit", "peaks", 2)?;
    let name = resolve(args.name, cfg, "fit", "name", "fit".to_string())?;
    if peaks == 0 {
        return Err(CliError::usage("peaks must be at least 1"));
    }

    let file = SpectrumFile::parse(&read_file(&input)?, &input)?;
    let spectrum = file.to_spectrum()?;
    let fit = fit_peaks(&spectrum, peaks, None)?;

    let report = FitReport::new(ctx.seed, &fit, 0.0);
    ctx.write_json(&format!("{name}_report.json"), &report)?;

    let data: Vec<(f64, f64)> = file.rows.clone();
    let model: Vec<(f64, f64)> = file
        .rows
        .iter()
        .map(|&(nm, _)| (nm, fit.model.density(HC_EV_NM / nm)))
        .collect();
    ctx.write_svg(
        &format!("{name}.svg"),
        &line_chart(
            "peak fit",
            "wavelength (nm)",
            "counts",
            &[
                Series {
                    points: &data,
                    color: "#1f77b4",
                    label: "data",
                },
                Series {
                    points: &model,
                    color: "#d62728",
                    label: "fit",
                },
            ],
        ),
    )?;
    Ok(())
}

#[derive(Debug, Args)]
pub struct DeconvArgs {
    /// Input spectrum CSV
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Instrument response fwhm in µeV [default: 15]
    #[arg(long)]
    pub irf_uev: Option<f64>,
    /// Regularization: "auto" (discrepancy rule) or a number ≥ 0 [default: auto]
    #[arg(long)]
    pub lambda: Option<String>,
    /// Peak count for the intrinsic fit (autodetected when omitted)
    #[arg(long)]
    pub peaks: Option<usize>,
    /// Output base name [default: deconv]
    #[arg(long)]
    pub name: Option<String>,
}

pub fn run_deconv(args: DeconvArgs, ctx: &Ctx) -> Result<(), CliError> {
    let cfg = &ctx.config;
    let input = resolve_opt(args.input, cfg, "deconv", "input")?
        .ok_or_else(|| CliError::usage("deconv requires --input"))?;
    let irf_uev = resolve(args.irf_uev, cfg, "deconv", "irf-uev", 15.0)?;
    let lambda = resolve(args.lambda, cfg, "deconv", "lambda", "auto".to_string())?;
    let peaks = resolve_opt(args.peaks, cfg, "deconv", "peaks")?;
    let name = resolve(args.name, cfg, "deconv", "name", "deconv".to_string())?;

    let lambda = match lambda.as_str() {
        "auto" => None,
        num => Some(num.parse::<f64>().map_err(|_| {
            CliError::usage(format!("lambda must be \"auto\" or a number, got {num:?}"))
        })?),
    };
    let irf = InstrumentResponse::new(irf_uev * 1e-6)?;

    let file = SpectrumFile::parse(&read_file(&input)?, &input)?;
    let measured = file.to_spectrum()?;
    // uniform energy grid for the convolution operator: at least the natural
    // sampling, and fine enough to resolve the response
    let natural = (measured.axis_ev()[measured.len() - 1] - measured.axis_ev()[0])
        / (measured.len() - 1) as f64;
    let spacing = natural.min(irf.fwhm_ev / 5.0);
    let uniform = measured.resample_uniform(spacing)?;

    let result = deconvolve(&uniform, &irf, lambda, peaks)?;

    let mut meta = Metadata::default();
    meta.push("seed", ctx.seed);
    meta.push("lambda", result.lambda);
    meta.push("irf_fwhm_uev", irf_uev);
    let out_file = SpectrumFile::from_spectrum(&result.intrinsic, meta);
    ctx.write_csv(&format!("{name}.csv"), &out_file.serialize())?;

    let report = FitReport::new(ctx.seed, &result.fit, result.lambda);
    ctx.write_json(&format!("{name}_report.json"), &report)?;

    let measured_pts: Vec<(f64, f64)> = file.rows.clone();
    let intrinsic_pts: Vec<(f64, f64)> = out_file.rows.clone();
    ctx.write_svg(
        &format!("{name}.svg"),
        &line_chart(
            "deconvolution",
            "wavelength (nm)",
            "counts",
            &[
                Series {
                    points: &measured_pts,
                    color: "#1f77b4",
                    label: "measured",
                },
                Series {
                    points: &intrinsic_pts,
                    color: "#d62728",
                    label: "intrinsic",
                },
            ],
        ),
    )?;
    Ok(())
}
