//! `qdot polar-fit`: hole-mixing fit of polarization-resolved intensity data.

use std::path::PathBuf;

use clap::Args;

use qdot_core::finestructure::{
    dipoles_from_mixing, extend_polarizer_data, fit_polar, pattern_intensity,
};

use super::Ctx;
use crate::config::{resolve, resolve_opt};
use crate::error::CliError;
use crate::formats::{polar_csv::PolarFile, read_file};
use crate::report::PolarReport;
use crate::svg::{polar_chart, Series};

#[derive(Debug, Args)]
pub struct PolarFitArgs {
    /// Input polar CSV
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Fixed out-of-plane mixing amplitude γ [default: 0]
    #[arg(long)]
    pub fixed_gamma: Option<f64>,
    /// Output base name [default: polar]
    #[arg(long)]
    pub name: Option<String>,
}

pub fn run(args: PolarFitArgs, ctx: &Ctx) -> Result<(), CliError> {
    let cfg = &ctx.config;
    let input = resolve_opt(args.input, cfg, "polar-fit", "input")?
        .ok_or_else(|| CliError::usage("polar-fit requires --input"))?;
    let fixed_gamma = resolve(args.fixed_gamma, cfg, "polar-fit", "fixed-gamma", 0.0)?;
    let name = resolve(args.name, cfg, "polar-fit", "name", "polar".to_string())?;

    let file = PolarFile::parse(&read_file(&input)?, &input)?;
    let pattern = file.to_pattern()?;
    // half-range measurements are mirrored to the full circle first
    let pattern = extend_polarizer_data(&pattern)?;
    let fit = fit_polar(&pattern, Some(fixed_gamma))?;

    let report = PolarReport::new(ctx.seed, &fit);
    ctx.write_json(&format!("{name}_report.json"), &report)?;

    let data: Vec<(f64, f64)> = pattern
        .angles_deg
        .iter()
        .zip(&pattern.intensities)
        .map(|(&a, &i)| (a, i))
        .collect();
    let dipoles = dipoles_from_mixing(&fit.params)?;
    let curve: Vec<(f64, f64)> = (0..=360)
        .map(|k| {
            let a = k as f64;
            (a, fit.scale * pattern_intensity(&dipoles, a))
        })
        .collect();
    ctx.write_svg(
        &format!("{name}.svg"),
        &polar_chart(
            "polarization-resolved intensity",
            &[
                Series {
                    points: &data,
                    color: "#1f77b4",
                    label: "data",
                },
                Series {
                    points: &curve,
                    color: "#d62728",
                    label: "fit",
                },
            ],
        ),
    )?;
    Ok(())
}
