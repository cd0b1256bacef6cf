//! qdot: simulation and analysis of single-photon-emitting quantum dots.
//!
//! Subcommands cover the full chain: spectrum synthesis, Lorentzian fitting,
//! instrument-response deconvolution, polarization-pattern fits, pulsed-HBT
//! Monte Carlo, g²(0) extraction, and array uniformity statistics. Every run
//! is reproducible from its seed and flags; exit codes are 0 success,
//! 1 usage/domain error, 2 I/O error, 3 non-convergence.

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use qdot_cli::commands::{self, Ctx, Formats};
use qdot_cli::config::{self, RunConfig};
use qdot_cli::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "qdot", version, about = "Quantum-dot single-photon source toolkit")]
struct Cli {
    /// Master random seed, recorded in every output [default: 1]
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory [default: .]
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Comma-separated artifacts to write: csv,json,svg [default: all]
    #[arg(long, global = true)]
    format: Option<String>,
    /// Key-value config file with one [section] per subcommand
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Synthesize a one- or two-line spectrum
    Synth(commands::synth::SynthArgs),
    /// Fit Lorentzian peaks to a spectrum file
    Fit(commands::fit::FitArgs),
    /// Deconvolve the instrument response from a spectrum file
    Deconv(commands::fit::DeconvArgs),
    /// Fit the hole-mixing model to polarization-resolved data
    PolarFit(commands::polar::PolarFitArgs),
    /// Simulate a pulsed emitter through the HBT interferometer
    HbtSim(commands::hbt::HbtSimArgs),
    /// Correlate a timestamp file and extract g²(0)
    G2(commands::hbt::G2Args),
    /// Uniformity statistics and pair discovery over an emitter array
    ArrayStats(commands::array::ArrayStatsArgs),
}

impl Command {
    fn section(&self) -> &'static str {
        match self {
            Command::Synth(_) => "synth",
            Command::Fit(_) => "fit",
            Command::Deconv(_) => "deconv",
            Command::PolarFit(_) => "polar-fit",
            Command::HbtSim(_) => "hbt-sim",
            Command::G2(_) => "g2",
            Command::ArrayStats(_) => "array-stats",
        }
    }
}

fn main() {
    match run() {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}

fn run() -> Result<(), CliError> {
    let cli = Cli::try_parse().map_err(|e| {
        use clap::error::ErrorKind;
        match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                // tolerate a closed pipe while printing help
                use std::io::Write;
                let _ = write!(std::io::stdout(), "{e}");
                std::process::exit(0);
            }
            _ => CliError::Usage(e.to_string()),
        }
    })?;

    let config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let section = cli.command.section();
    let seed = config::resolve(cli.seed, &config, section, "seed", 1)?;
    let out_dir = match cli.out {
        Some(dir) => dir,
        None => config
            .get(section, "out")
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from(".")),
    };
    let format_spec = config::resolve(
        cli.format,
        &config,
        section,
        "format",
        "csv,json,svg".to_string(),
    )?;
    let ctx = Ctx {
        seed,
        out_dir,
        formats: Formats::parse(&format_spec)?,
        config,
    };

    match cli.command {
        Command::Synth(args) => commands::synth::run(args, &ctx),
        Command::Fit(args) => commands::fit::run_fit(args, &ctx),
        Command::Deconv(args) => commands::fit::run_deconv(args, &ctx),
        Command::PolarFit(args) => commands::polar::run(args, &ctx),
        Command::HbtSim(args) => commands::hbt::run_sim(args, &ctx),
        Command::G2(args) => commands::hbt::run_g2(args, &ctx),
        Command::ArrayStats(args) => commands::array::run(args, &ctx),
    }
}
