//! Plain `key = value` configuration files, merged under explicit flags.
//!
//! Lines starting with `#` (or trailing `# ...` fragments) are comments.
//! Values stay strings until a typed accessor parses them, so the CLI can
//! layer its own flag values on top without caring about types.

use crate::error::{Error, Result};
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Debug, Clone, Default)]
pub struct FileConfig {
    values: BTreeMap<String, String>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<FileConfig> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(i + 1, "expected key = value"))?;
            let key = key.trim();
            if key.is_empty() {
                return Err(Error::parse(i + 1, "empty key"));
            }
            values.insert(key.to_string(), value.trim().to_string());
        }
        Ok(FileConfig { values })
    }

    pub fn load(path: &Path) -> Result<FileConfig> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.values.insert(key.to_string(), value.to_string());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|s| s.as_str())
    }

    pub fn get_f64(&self, key: &str) -> Result<Option<f64>> {
        self.get(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| Error::invalid(format!("config key {key}: bad number {v:?}")))
            })
            .transpose()
    }

    pub fn get_usize(&self, key: &str) -> Result<Option<usize>> {
        self.get(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| Error::invalid(format!("config key {key}: bad integer {v:?}")))
            })
            .transpose()
    }

    pub fn get_bool(&self, key: &str) -> Result<Option<bool>> {
        self.get(key)
            .map(|v| match v {
                "true" | "1" | "yes" | "on" => Ok(true),
                "false" | "0" | "no" | "off" => Ok(false),
                other => Err(Error::invalid(format!("config key {key}: bad bool {other:?}"))),
            })
            .transpose()
    }

    /// Overlay `other` on top of `self` (later wins).
    pub fn merged_under(mut self, other: &FileConfig) -> FileConfig {
        for (k, v) in &other.values {
            self.values.insert(k.clone(), v.clone());
        }
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_values() {
        let cfg = FileConfig::parse("# header\np = 2.0\nmax_iters = 100 # inline\n\n").unwrap();
        assert_eq!(cfg.get_f64("p").unwrap(), Some(2.0));
        assert_eq!(cfg.get_usize("max_iters").unwrap(), Some(100));
        assert_eq!(cfg.get("missing"), None);
    }

    #[test]
    fn merge_prefers_overlay() {
        let base = FileConfig::parse("a = 1\nb = 2\n").unwrap();
        let over = FileConfig::parse("b = 3\n").unwrap();
        let merged = base.merged_under(&over);
        assert_eq!(merged.get("a"), Some("1"));
        assert_eq!(merged.get("b"), Some("3"));
    }

    #[test]
    fn bad_lines_rejected() {
        assert!(FileConfig::parse("just words\n").is_err());
        assert!(FileConfig::parse("= 3\n").is_err());
        assert!(FileConfig::parse("x = y\n").unwrap().get_f64("x").is_err());
    }
}
