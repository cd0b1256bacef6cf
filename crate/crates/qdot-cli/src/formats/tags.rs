//! `# qdot-tags v1`: metadata, then `detector,time_ns` rows sorted by time.

use std::path::Path;

use qdot_core::photon::{DetectorId, PhotonError, TimestampStream};

use super::{parse_f64, parse_header, render_header, Metadata};
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct TagsFile {
    pub metadata: Metadata,
    /// (detector, time_ns), globally time-sorted.
    pub rows: Vec<(DetectorId, f64)>,
}

impl TagsFile {
    pub fn parse(text: &str, path: &Path) -> Result<Self, CliError> {
        let (metadata, lines) = parse_header(text, "tags", path)?;
        let mut rows = Vec::with_capacity(lines.len());
        let mut last = f64::NEG_INFINITY;
        for (line_no, line) in lines {
            let (det, time) = line.split_once(',').ok_or_else(|| {
                CliError::io(format!(
                    "{}:{line_no}: expected detector,time_ns",
                    path.display()
                ))
            })?;
            let detector = match det.trim() {
                "A" => DetectorId::A,
                "B" => DetectorId::B,
                other => {
                    return Err(CliError::io(format!(
                        "{}:{line_no}: detector must be A or B, got {other:?}",
                        path.display()
                    )))
                }
            };
            let t = parse_f64(time, line_no, path)?;
            if t < last {
                return Err(CliError::io(format!(
                    "{}:{line_no}: timestamps must be sorted",
                    path.display()
                )));
            }
            last = t;
            rows.push((detector, t));
        }
        Ok(Self { metadata, rows })
    }

    pub fn serialize(&self) -> String {
        let mut out = render_header("tags", &self.metadata);
        for (det, t) in &self.rows {
            let d = match det {
                DetectorId::A => 'A',
                DetectorId::B => 'B',
            };
            out.push_str(&format!("{d},{t}\n"));
        }
        out
    }

    pub fn to_streams(&self) -> Result<(TimestampStream, TimestampStream), CliError> {
        let duration_s = self
            .metadata
            .get_f64("duration_s")
            .ok_or_else(|| CliError::usage("tags file missing duration_s metadata"))?;
        let a: Vec<f64> = self
            .rows
            .iter()
            .filter(|(d, _)| *d == DetectorId::A)
            .map(|(_, t)| *t)
            .collect();
        let b: Vec<f64> = self
            .rows
            .iter()
            .filter(|(d, _)| *d == DetectorId::B)
            .map(|(_, t)| *t)
            .collect();
        let a = TimestampStream::new(DetectorId::A, a, duration_s).map_err(convert_err)?;
        let b = TimestampStream::new(DetectorId::B, b, duration_s).map_err(convert_err)?;
        Ok((a, b))
    }

    pub fn from_streams(
        a: &TimestampStream,
        b: &TimestampStream,
        metadata: Metadata,
    ) -> Self {
        let mut rows: Vec<(DetectorId, f64)> =
            Vec::with_capacity(a.len() + b.len());
        let (ta, tb) = (a.times_ns(), b.times_ns());
        let (mut i, mut j) = (0, 0);
        while i < ta.len() || j < tb.len() {
            let take_a = match (ta.get(i), tb.get(j)) {
                (Some(x), Some(y)) => x <= y,
                (Some(_), None) => true,
                _ => false,
            };
            if take_a {
                rows.push((DetectorId::A, ta[i]));
                i += 1;
            } else {
                rows.push((DetectorId::B, tb[j]));
                j += 1;
            }
        }
        Self { metadata, rows }
    }

    pub fn pulse_period_ns(&self) -> Option<f64> {
        self.metadata.get_f64("pulse_period_ns")
    }
}

fn convert_err(e: PhotonError) -> CliError {
    CliError::io(format!("tags file: {e}"))
}
