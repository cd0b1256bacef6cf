//! `# qdot-array v1`: metadata, then `row,col,wavelength_nm[,label]`.

use std::path::Path;

use qdot_core::array_map::{QdArrayMap, QdEntry};
use qdot_core::units::Wavelength;

use super::{parse_f64, parse_header, render_header, Metadata};
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct ArrayFile {
    pub metadata: Metadata,
    pub rows: Vec<(u32, u32, f64, Option<String>)>,
}

impl ArrayFile {
    pub fn parse(text: &str, path: &Path) -> Result<Self, CliError> {
        let (metadata, lines) = parse_header(text, "array", path)?;
        let mut rows = Vec::with_capacity(lines.len());
        for (line_no, line) in lines {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() < 3 || fields.len() > 4 {
                return Err(CliError::io(format!(
                    "{}:{line_no}: expected row,col,wavelength_nm[,label]",
                    path.display()
                )));
            }
            let parse_u32 = |f: &str| -> Result<u32, CliError> {
                f.trim().parse().map_err(|_| {
                    CliError::io(format!(
                        "{}:{line_no}: cannot parse index {f:?}",
                        path.display()
                    ))
                })
            };
            let row = parse_u32(fields[0])?;
            let col = parse_u32(fields[1])?;
            let wl = parse_f64(fields[2], line_no, path)?;
            let label = fields.get(3).map(|s| s.trim().to_string());
            rows.push((row, col, wl, label));
        }
        Ok(Self { metadata, rows })
    }

    pub fn serialize(&self) -> String {
        let mut out = render_header("array", &self.metadata);
        for (r, c, wl, label) in &self.rows {
            match label {
                Some(l) => out.push_str(&format!("{r},{c},{wl},{l}\n")),
                None => out.push_str(&format!("{r},{c},{wl}\n")),
            }
        }
        out
    }

    pub fn to_map(&self) -> Result<QdArrayMap, CliError> {
        let entries = self
            .rows
            .iter()
            .map(|(r, c, wl, label)| {
                Ok(QdEntry {
                    row: *r,
                    col: *c,
                    wavelength: Wavelength::from_nm(*wl)?,
                    label: label.clone(),
                })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        let rows = entries.iter().map(|e| e.row).max().map_or(0, |m| m + 1);
        let cols = entries.iter().map(|e| e.col).max().map_or(0, |m| m + 1);
        Ok(QdArrayMap::new(entries, rows, cols)?)
    }

    pub fn from_map(map: &QdArrayMap, metadata: Metadata) -> Self {
        let rows = map
            .entries()
            .iter()
            .map(|e| (e.row, e.col, e.wavelength.as_nm(), e.label.clone()))
            .collect();
        Self { metadata, rows }
    }
}
