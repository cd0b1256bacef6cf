//! `# qdot-spectrum v1`: metadata, then `wavelength_nm,counts` rows in
//! increasing wavelength.

use std::path::Path;

use qdot_core::spectrum::{Spectrum, SpectrumMetadata};
use qdot_core::units::HC_EV_NM;

use super::{parse_f64, parse_header, render_header, Metadata};
use crate::error::CliError;

/// A spectrum file as stored on disk: wavelength-ordered rows. Keeping the
/// parsed values verbatim makes parse→serialize the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumFile {
    pub metadata: Metadata,
    /// (wavelength_nm, counts), increasing wavelength.
    pub rows: Vec<(f64, f64)>,
}

impl SpectrumFile {
    pub fn parse(text: &str, path: &Path) -> Result<Self, CliError> {
        let (metadata, lines) = parse_header(text, "spectrum", path)?;
        let mut rows = Vec::with_capacity(lines.len());
        let mut last_wl = f64::NEG_INFINITY;
        for (line_no, line) in lines {
            let (a, b) = line.split_once(',').ok_or_else(|| {
                CliError::io(format!(
                    "{}:{line_no}: expected wavelength_nm,counts",
                    path.display()
                ))
            })?;
            let wl = parse_f64(a, line_no, path)?;
            let counts = parse_f64(b, line_no, path)?;
            if wl <= last_wl {
                return Err(CliError::io(format!(
                    "{}:{line_no}: wavelengths must increase",
                    path.display()
                )));
            }
            last_wl = wl;
            rows.push((wl, counts));
        }
        if rows.len() < 2 {
            return Err(CliError::io(format!(
                "{}: need at least 2 data rows",
                path.display()
            )));
        }
        Ok(Self { metadata, rows })
    }

    pub fn serialize(&self) -> String {
        let mut out = render_header("spectrum", &self.metadata);
        for (wl, counts) in &self.rows {
            out.push_str(&format!("{wl},{counts}\n"));
        }
        out
    }

    /// Converts to the in-memory spectrum (energy-ascending axis).
    pub fn to_spectrum(&self) -> Result<Spectrum, CliError> {
        let wl: Vec<f64> = self.rows.iter().map(|r| r.0).collect();
        let counts: Vec<f64> = self.rows.iter().map(|r| r.1).collect();
        let meta = SpectrumMetadata {
            power_nw: self.metadata.get_f64("power_nw"),
            temperature_k: self.metadata.get_f64("temperature_k"),
            integration: self.metadata.get("integration").map(str::to_string),
            extra: Vec::new(),
        };
        Ok(Spectrum::from_wavelength_samples(&wl, &counts, meta)?)
    }

    /// Builds the file view of a spectrum: rows emitted in increasing
    /// wavelength (reverse of the energy axis).
    pub fn from_spectrum(s: &Spectrum, mut metadata: Metadata) -> Self {
        if metadata.get("power_nw").is_none() {
            if let Some(p) = s.metadata().power_nw {
                metadata.push("power_nw", p);
            }
        }
        if metadata.get("temperature_k").is_none() {
            if let Some(t) = s.metadata().temperature_k {
                metadata.push("temperature_k", t);
            }
        }
        if metadata.get("integration").is_none() {
            if let Some(i) = &s.metadata().integration {
                metadata.push("integration", i);
            }
        }
        let rows = (0..s.len())
            .rev()
            .map(|i| (HC_EV_NM / s.axis_ev()[i], s.counts()[i]))
            .collect();
        Self { metadata, rows }
    }
}
