//! `# qdot-g2 v1`: metadata, then `tau_ns,counts` rows (bin centers).

use std::path::Path;

use qdot_core::photon::CoincidenceHistogram;

use super::{parse_f64, parse_header, render_header, Metadata};
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct HistogramFile {
    pub metadata: Metadata,
    pub rows: Vec<(f64, u64)>,
}

impl HistogramFile {
    pub fn parse(text: &str, path: &Path) -> Result<Self, CliError> {
        let (metadata, lines) = parse_header(text, "g2", path)?;
        let mut rows = Vec::with_capacity(lines.len());
        for (line_no, line) in lines {
            let (tau, counts) = line.split_once(',').ok_or_else(|| {
                CliError::io(format!(
                    "{}:{line_no}: expected tau_ns,counts",
                    path.display()
                ))
            })?;
            let tau = parse_f64(tau, line_no, path)?;
            let counts: u64 = counts.trim().parse().map_err(|_| {
                CliError::io(format!(
                    "{}:{line_no}: cannot parse counts {counts:?}",
                    path.display()
                ))
            })?;
            rows.push((tau, counts));
        }
        Ok(Self { metadata, rows })
    }

    pub fn serialize(&self) -> String {
        let mut out = render_header("g2", &self.metadata);
        for (tau, counts) in &self.rows {
            out.push_str(&format!("{tau},{counts}\n"));
        }
        out
    }

    pub fn to_histogram(&self) -> Result<CoincidenceHistogram, CliError> {
        let need = |key: &str| -> Result<f64, CliError> {
            self.metadata
                .get_f64(key)
                .ok_or_else(|| CliError::usage(format!("histogram file missing {key} metadata")))
        };
        Ok(CoincidenceHistogram {
            bin_width_ns: need("bin_width_ns")?,
            tau_max_ns: need("tau_max_ns")?,
            counts: self.rows.iter().map(|r| r.1).collect(),
            pulse_period_ns: need("pulse_period_ns")?,
            duration_s: need("duration_s")?,
        })
    }

    pub fn from_histogram(h: &CoincidenceHistogram, mut metadata: Metadata) -> Self {
        metadata.push("bin_width_ns", h.bin_width_ns);
        metadata.push("tau_max_ns", h.tau_max_ns);
        metadata.push("pulse_period_ns", h.pulse_period_ns);
        metadata.push("duration_s", h.duration_s);
        let rows = (0..h.num_bins()).map(|i| (h.tau_at(i), h.counts[i])).collect();
        Self { metadata, rows }
    }
}
