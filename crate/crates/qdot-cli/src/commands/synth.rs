//! `qdot synth`: synthesize a one- or two-line spectrum on a uniform
//! wavelength grid, as a spectrometer would record it. Defaults reproduce
//! the bundled two-peak reference scenario.

use clap::Args;

use qdot_core::lineshape::{synthesize, LorentzianPeak, Noise, PeakModel};
use qdot_core::spectrum::SpectrumMetadata;
use qdot_core::units::{wavelength_to_energy, Wavelength};

use super::Ctx;
use crate::config::resolve;
use crate::error::CliError;
use crate::formats::{spectrum_csv::SpectrumFile, Metadata};
use crate::svg::{line_chart, Series};

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Number of peaks (1 or 2) [default: 2]
    #[arg(long)]
    pub peaks: Option<usize>,
    /// First peak center in nm [default: 919.108]
    #[arg(long)]
    pub center1_nm: Option<f64>,
    /// First peak fwhm in µeV [default: 21]
    #[arg(long)]
    pub fwhm1_uev: Option<f64>,
    /// First peak height in counts [default: 4000]
    #[arg(long)]
    pub height1: Option<f64>,
    /// Second peak center in nm [default: 918.891]
    #[arg(long)]
    pub center2_nm: Option<f64>,
    /// Second peak fwhm in µeV [default: 34]
    #[arg(long)]
    pub fwhm2_uev: Option<f64>,
    /// Second peak height in counts [default: 1500]
    #[arg(long)]
    pub height2: Option<f64>,
    /// Constant background counts [default: 40]
    #[arg(long)]
    pub background: Option<f64>,
    /// Grid start wavelength in nm [default: 918.4]
    #[arg(long)]
    pub min_nm: Option<f64>,
    /// Grid stop wavelength in nm [default: 919.6]
    #[arg(long)]
    pub max_nm: Option<f64>,
    /// Grid points [default: 1200]
    #[arg(long)]
    pub points: Option<usize>,
    /// Noise model: poisson or none [default: poisson]
    #[arg(long)]
    pub noise: Option<String>,
    /// Excitation power metadata in nW [default: 30]
    #[arg(long)]
    pub power_nw: Option<f64>,
    /// Temperature metadata in K [default: 9.4]
    #[arg(long)]
    pub temperature_k: Option<f64>,
    /// Output base name [default: spectrum]
    #[arg(long)]
    pub name: Option<String>,
}

pub fn run(args: SynthArgs, ctx: &Ctx) -> Result<(), CliError> {
    let cfg = &ctx.config;
    let sec = "synth";
    let peaks = resolve(args.peaks, cfg, sec, "peaks", 2)?;
    if !(1..=2).contains(&peaks) {
        return Err(CliError::usage("synth supports 1 or 2 peaks"));
    }
    let center1_nm = resolve(args.center1_nm, cfg, sec, "center1-nm", 919.108)?;
    let fwhm1_uev = resolve(args.fwhm1_uev, cfg, sec, "fwhm1-uev", 21.0)?;
    let height1 = resolve(args.height1, cfg, sec, "height1", 4000.0)?;
    let center2_nm = resolve(args.center2_nm, cfg, sec, "center2-nm", 918.891)?;
    let fwhm2_uev = resolve(args.fwhm2_uev, cfg, sec, "fwhm2-uev", 34.0)?;
    let height2 = resolve(args.height2, cfg, sec, "height2", 1500.0)?;
    let background = resolve(args.background, cfg, sec, "background", 40.0)?;
    let min_nm = resolve(args.min_nm, cfg, sec, "min-nm", 918.4)?;
    let max_nm = resolve(args.max_nm, cfg, sec, "max-nm", 919.6)?;
    let points = resolve(args.points, cfg, sec, "points", 1200)?;
    let noise = resolve(args.noise, cfg, sec, "noise", "poisson".to_string())?;
    let power_nw = resolve(args.power_nw, cfg, sec, "power-nw", 30.0)?;
    let temperature_k = resolve(args.temperature_k, cfg, sec, "temperature-k", 9.4)?;
    let name = resolve(args.name, cfg, sec, "name", "spectrum".to_string())?;

    if points < 2 {
        return Err(CliError::usage("points must be at least 2"));
    }
    if !(max_nm > min_nm) {
        return Err(CliError::usage("max-nm must exceed min-nm"));
    }
    let noise = match noise.as_str() {
        "none" => Noise::None,
        "poisson" => Noise::Poisson { seed: ctx.seed },
        other => {
            return Err(CliError::usage(format!(
                "unknown noise model {other:?} (expected poisson or none)"
            )))
        }
    };

    let peak = |nm: f64, fwhm_uev: f64, height: f64| -> Result<LorentzianPeak, CliError> {
        let center = wavelength_to_energy(Wavelength::from_nm(nm)?);
        let fwhm_ev = fwhm_uev * 1e-6;
        Ok(LorentzianPeak::new(
            center,
            fwhm_ev,
            height * core::f64::consts::PI * fwhm_ev / 2.0,
        )?)
    };
    let mut model_peaks = vec![peak(center1_nm, fwhm1_uev, height1)?];
    if peaks == 2 {
        model_peaks.push(peak(center2_nm, fwhm2_uev, height2)?);
    }
    let model = PeakModel::new(model_peaks, background)?;

    // uniform wavelength grid, converted to an energy axis
    let step = (max_nm - min_nm) / (points - 1) as f64;
    let wavelengths: Vec<f64> = (0..points).map(|i| min_nm + step * i as f64).collect();
    let mut axis: Vec<f64> = wavelengths
        .iter()
        .rev()
        .map(|&nm| qdot_core::units::HC_EV_NM / nm)
        .collect();
    axis.dedup();

    let meta = SpectrumMetadata {
        power_nw: Some(power_nw),
        temperature_k: Some(temperature_k),
        integration: Some("synthetic".to_string()),
        extra: Vec::new(),
    };
    let spectrum = synthesize(&model, &axis, noise, meta)?;

    let mut file_meta = Metadata::default();
    file_meta.push("seed", ctx.seed);
    let file = SpectrumFile::from_spectrum(&spectrum, file_meta);
    ctx.write_csv(&format!("{name}.csv"), &file.serialize())?;

    let pts: Vec<(f64, f64)> = file.rows.clone();
    ctx.write_svg(
        &format!("{name}.svg"),
        &line_chart(
            "synthesized spectrum",
            "wavelength (nm)",
            "counts",
            &[Series {
                points: &pts,
                color: "#1f77b4",
                label: "counts",
            }],
        ),
    )?;
    Ok(())
}
