//! On-disk data formats. Every format is line-oriented: a `# qdot-<kind> v1`
//! header, `# key=value` metadata lines in order, then comma-separated data
//! rows. Serializing a parsed file reproduces it byte for byte: raw values
//! are kept as parsed and floats are written in shortest round-trip form.

use std::path::Path;

use crate::error::CliError;

pub mod array_csv;
pub mod histogram_csv;
pub mod polar_csv;
pub mod spectrum_csv;
pub mod tags;

/// Ordered `# key=value` metadata block.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Metadata {
    pub entries: Vec<(String, String)>,
}

impl Metadata {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn get_f64(&self, key: &str) -> Option<f64> {
        self.get(key)?.parse().ok()
    }

    pub fn push(&mut self, key: &str, value: impl std::fmt::Display) {
        self.entries.push((key.to_string(), value.to_string()));
    }
}

/// Splits a file into (metadata, data-row lines with 1-based numbers),
/// checking the `# qdot-<kind> v1` header.
pub fn parse_header<'a>(
    text: &'a str,
    kind: &str,
    path: &Path,
) -> Result<(Metadata, Vec<(usize, &'a str)>), CliError> {
    let mut lines = text.lines().enumerate();
    let expected = format!("# qdot-{kind} v1");
    match lines.next() {
        Some((_, first)) if first.trim_end() == expected => {}
        Some((_, first)) => {
            return Err(CliError::io(format!(
                "{}:1: expected header {expected:?}, found {first:?}",
                path.display()
            )))
        }
        None => return Err(CliError::io(format!("{}: empty file", path.display()))),
    }
    let mut metadata = Metadata::default();
    let mut rows = Vec::new();
    for (idx, raw) in lines {
        let line = raw.trim_end();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim_start();
            if let Some((k, v)) = rest.split_once('=') {
                metadata.push(k.trim(), v.trim());
            }
            continue;
        }
        rows.push((idx + 1, line));
    }
    Ok((metadata, rows))
}

pub fn render_header(kind: &str, metadata: &Metadata) -> String {
    let mut out = format!("# qdot-{kind} v1\n");
    for (k, v) in &metadata.entries {
        out.push_str(&format!("# {k}={v}\n"));
    }
    out
}

pub fn parse_f64(field: &str, line: usize, path: &Path) -> Result<f64, CliError> {
    field.trim().parse::<f64>().map_err(|_| {
        CliError::io(format!(
            "{}:{line}: cannot parse number {field:?}",
            path.display()
        ))
    })
}

pub fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(format!("{}: {e}", path.display())))
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)
                .map_err(|e| CliError::io(format!("{}: {e}", dir.display())))?;
        }
    }
    std::fs::write(path, contents).map_err(|e| CliError::io(format!("{}: {e}", path.display())))
}
