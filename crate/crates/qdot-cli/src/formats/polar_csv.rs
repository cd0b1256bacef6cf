//! `# qdot-polar v1`: metadata, then `angle_deg,intensity[,uncertainty]`.

use std::path::Path;

use qdot_core::finestructure::PolarPattern;

use super::{parse_f64, parse_header, render_header, Metadata};
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct PolarFile {
    pub metadata: Metadata,
    pub rows: Vec<(f64, f64, Option<f64>)>,
}

impl PolarFile {
    pub fn parse(text: &str, path: &Path) -> Result<Self, CliError> {
        let (metadata, lines) = parse_header(text, "polar", path)?;
        let mut rows = Vec::with_capacity(lines.len());
        for (line_no, line) in lines {
            let mut fields = line.split(',');
            let angle = parse_f64(
                fields.next().unwrap_or_default(),
                line_no,
                path,
            )?;
            let intensity = parse_f64(
                fields.next().ok_or_else(|| {
                    CliError::io(format!(
                        "{}:{line_no}: expected angle_deg,intensity[,uncertainty]",
                        path.display()
                    ))
                })?,
                line_no,
                path,
            )?;
            let uncertainty = match fields.next() {
                Some(f) => Some(parse_f64(f, line_no, path)?),
                None => None,
            };
            if fields.next().is_some() {
                return Err(CliError::io(format!(
                    "{}:{line_no}: too many fields",
                    path.display()
                )));
            }
            rows.push((angle, intensity, uncertainty));
        }
        Ok(Self { metadata, rows })
    }

    pub fn serialize(&self) -> String {
        let mut out = render_header("polar", &self.metadata);
        for (a, i, u) in &self.rows {
            match u {
                Some(u) => out.push_str(&format!("{a},{i},{u}\n")),
                None => out.push_str(&format!("{a},{i}\n")),
            }
        }
        out
    }

    pub fn to_pattern(&self) -> Result<PolarPattern, CliError> {
        let angles: Vec<f64> = self.rows.iter().map(|r| r.0).collect();
        let intensities: Vec<f64> = self.rows.iter().map(|r| r.1).collect();
        let uncertainties = if self.rows.iter().all(|r| r.2.is_some()) {
            Some(self.rows.iter().map(|r| r.2.unwrap()).collect())
        } else {
            None
        };
        Ok(PolarPattern::new(angles, intensities, uncertainties)?)
    }

    pub fn from_pattern(p: &PolarPattern, metadata: Metadata) -> Self {
        let rows = (0..p.len())
            .map(|i| {
                (
                    p.angles_deg[i],
                    p.intensities[i],
                    p.uncertainties.as_ref().map(|u| u[i]),
                )
            })
            .collect();
        Self { metadata, rows }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::PathBuf;

    #[test]
    fn round_trip_with_and_without_uncertainty() {
        let p = PathBuf::from("polar.csv");
        let text = "# qdot-polar v1\n# seed=3\n0,100,10\n10,120,11\n";
        let f = PolarFile::parse(text, &p).unwrap();
        assert_eq!(f.serialize(), text);
        let pat = f.to_pattern().unwrap();
        assert!(pat.uncertainties.is_some());

        let text2 = "# qdot-polar v1\n0,100\n10,120\n";
        let f2 = PolarFile::parse(text2, &p).unwrap();
        assert_eq!(f2.serialize(), text2);
        assert!(f2.to_pattern().unwrap().uncertainties.is_none());
    }

    #[test]
    fn field_count_errors() {
        let p = PathBuf::from("polar.csv");
        assert!(PolarFile::parse("# qdot-polar v1\n0\n", &p).is_err());
        assert!(PolarFile::parse("# qdot-polar v1\n0,1,2,3\n", &p).is_err());
    }
}
