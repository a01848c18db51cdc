//! `key = value` run configuration, overridden by command-line flags.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

/// Keys a configuration file may set.
pub const KEYS: &[&str] = &[
    "delta",
    "epsilon",
    "omega",
    "format",
    "truncation",
    "levels",
    "steps",
    "g_min",
    "g_max",
    "n_max",
    "seed",
    "x_min",
    "x_max",
    "samples",
    "form",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FileConfig {
    values: BTreeMap<String, String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Blank lines and lines starting with `#` are skipped; `-` in keys is
    /// read as `_`.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Usage(format!("config line {}: expected key=value", i + 1))
            })?;
            let key = key.trim().replace('-', "_");
            if !KEYS.contains(&key.as_str()) {
                return Err(CliError::Usage(format!(
                    "config line {}: unknown key `{key}`",
                    i + 1
                )));
            }
            values.insert(key, value.trim().to_string());
        }
        Ok(Self { values })
    }

    /// `flag`, else the file value for `key`, else `default`.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, CliError> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.values.get(key) {
            Some(raw) => raw
                .parse()
                .map_err(|_| CliError::Usage(format!("config: bad value `{raw}` for `{key}`"))),
            None => Ok(default),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let c = FileConfig::parse("# run\ndelta = 0.9\ng-max=2\n").unwrap();
        assert_eq!(c.pick(None, "delta", 1.2).unwrap(), 0.9);
        assert_eq!(c.pick(Some(0.5), "delta", 1.2).unwrap(), 0.5);
        assert_eq!(c.pick(None, "g_max", 1.0).unwrap(), 2.0);
        assert_eq!(c.pick(None, "omega", 1.0).unwrap(), 1.0);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(FileConfig::parse("colour=red").is_err());
        assert!(FileConfig::parse("delta").is_err());
        let c = FileConfig::parse("steps=many").unwrap();
        assert!(c.pick::<usize>(None, "steps", 3).is_err());
    }
}
