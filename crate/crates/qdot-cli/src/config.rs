//! Flat key-value run configuration with one section per subcommand:
//!
//! ```text
//! [synth]
//! points = 1200
//! noise = poisson
//!
//! [g2]
//! bin-ns = 0.128
//! ```
//!
//! Keys are the long flag names. Command-line flags override file values.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::CliError;

#[derive(Debug, Clone, Default)]
pub struct RunConfig {
    sections: BTreeMap<String, BTreeMap<String, String>>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|(line, msg)| {
            CliError::io(format!("{}:{line}: {msg}", path.display()))
        })
    }

    pub fn parse(text: &str) -> Result<Self, (usize, String)> {
        let mut sections: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
        let mut current = String::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or((idx + 1, "unterminated section header".to_string()))?;
                current = name.trim().to_string();
                sections.entry(current.clone()).or_default();
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or((idx + 1, format!("expected key = value, got {line:?}")))?;
            if current.is_empty() {
                return Err((idx + 1, "key outside any [section]".to_string()));
            }
            sections
                .get_mut(&current)
                .expect("section inserted above")
                .insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(Self { sections })
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.sections.get(section)?.get(key).map(String::as_str)
    }

    /// Typed lookup; parse failures surface as usage errors naming the key.
    pub fn get_parsed<T: std::str::FromStr>(
        &self,
        section: &str,
        key: &str,
    ) -> Result<Option<T>, CliError> {
        match self.get(section, key) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|_| {
                CliError::usage(format!("config [{section}] {key}: cannot parse {raw:?}"))
            }),
        }
    }
}

/// Flag value if given, else config value, else default.
pub fn resolve<T: std::str::FromStr + Clone>(
    flag: Option<T>,
    cfg: &RunConfig,
    section: &str,
    key: &str,
    default: T,
) -> Result<T, CliError> {
    if let Some(v) = flag {
        return Ok(v);
    }
    Ok(cfg.get_parsed::<T>(section, key)?.unwrap_or(default))
}

/// Flag value if given, else config value, else None.
pub fn resolve_opt<T: std::str::FromStr>(
    flag: Option<T>,
    cfg: &RunConfig,
    section: &str,
    key: &str,
) -> Result<Option<T>, CliError> {
    if flag.is_some() {
        return Ok(flag);
    }
    cfg.get_parsed::<T>(section, key)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_and_values() {
        let cfg = RunConfig::parse("# comment\n[synth]\npoints = 1200\nnoise=poisson\n\n[g2]\nbin-ns = 0.5\n").unwrap();
        assert_eq!(cfg.get("synth", "points"), Some("1200"));
        assert_eq!(cfg.get("synth", "noise"), Some("poisson"));
        assert_eq!(cfg.get("g2", "bin-ns"), Some("0.5"));
        assert_eq!(cfg.get("g2", "missing"), None);
        let points: Option<usize> = cfg.get_parsed("synth", "points").unwrap();
        assert_eq!(points, Some(1200));
    }

    #[test]
    fn rejects_malformed() {
        assert!(RunConfig::parse("key = 1\n").is_err());
        assert!(RunConfig::parse("[s\n").is_err());
        assert!(RunConfig::parse("[s]\nnot a pair\n").is_err());
    }

    #[test]
    fn flag_overrides_config() {
        let cfg = RunConfig::parse("[synth]\npoints = 1200\n").unwrap();
        let v = resolve(Some(7usize), &cfg, "synth", "points", 3).unwrap();
        assert_eq!(v, 7);
        let v = resolve(None, &cfg, "synth", "points", 3).unwrap();
        assert_eq!(v, 1200);
        let v = resolve(None::<usize>, &cfg, "synth", "nothing", 3).unwrap();
        assert_eq!(v, 3);
    }
}
