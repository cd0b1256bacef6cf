//! Subcommand implementations. Every command is a pure function of its
//! inputs, flags, and the master seed; outputs land in the `--out` directory.

use std::path::PathBuf;

use serde::Serialize;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::formats::write_file;
use crate::report::to_json_string;

pub mod array;
pub mod fit;
pub mod hbt;
pub mod polar;
pub mod synth;

/// Which artifact kinds a command writes.
#[derive(Debug, Clone, Copy)]
pub struct Formats {
    pub csv: bool,
    pub json: bool,
    pub svg: bool,
}

impl Formats {
    pub fn parse(spec: &str) -> Result<Self, CliError> {
        let mut f = Formats {
            csv: false,
            json: false,
            svg: false,
        };
        for part in spec.split(',') {
            match part.trim() {
                "csv" => f.csv = true,
                "json" => f.json = true,
                "svg" => f.svg = true,
                other => {
                    return Err(CliError::usage(format!(
                        "unknown format {other:?} (expected csv, json, svg)"
                    )))
                }
            }
        }
        Ok(f)
    }
}

/// Shared run context: master seed, output directory, formats, config file.
pub struct Ctx {
    pub seed: u64,
    pub out_dir: PathBuf,
    pub formats: Formats,
    pub config: RunConfig,
}

impl Ctx {
    pub fn path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }

    pub fn write_json(&self, name: &str, report: &impl Serialize) -> Result<(), CliError> {
        if self.formats.json {
            let path = self.path(name);
            write_file(&path, &to_json_string(report))?;
            println!("wrote {}", path.display());
        }
        Ok(())
    }

    pub fn write_csv(&self, name: &str, contents: &str) -> Result<(), CliError> {
        if self.formats.csv {
            let path = self.path(name);
            write_file(&path, contents)?;
            println!("wrote {}", path.display());
        }
        Ok(())
    }

    pub fn write_svg(&self, name: &str, contents: &str) -> Result<(), CliError> {
        if self.formats.svg {
            let path = self.path(name);
            write_file(&path, contents)?;
            println!("wrote {}", path.display());
        }
        Ok(())
    }
}
