//! Plain-text `name = value` configuration files.
//!
//! One assignment per line, SI units. Blank lines and `#` comments are
//! ignored. Each configurable struct implements [`KeyValue`]; unknown keys
//! and duplicate keys are rejected.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// One parsed `name = value` line.
#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

pub fn parse_entries(text: &str, source_name: &str) -> Result<Vec<Entry>> {
    let mut entries: Vec<Entry> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| Error::Config {
            source_name: source_name.to_string(),
            line,
            message: format!("expected `name = value`, got `{content}`"),
        })?;
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() || value.is_empty() {
            return Err(Error::Config {
                source_name: source_name.to_string(),
                line,
                message: "empty name or value".into(),
            });
        }
        if entries.iter().any(|e| e.key == key) {
            return Err(Error::Config {
                source_name: source_name.to_string(),
                line,
                message: format!("duplicate key `{key}`"),
            });
        }
        entries.push(Entry {
            key: key.to_string(),
            value: value.to_string(),
            line,
        });
    }
    Ok(entries)
}

/// A struct that can be read from and written to the key-value format.
pub trait KeyValue: Sized + Clone {
    /// Applies one assignment. Returns `Ok(false)` if the key is unknown.
    fn set(&mut self, key: &str, value: &str) -> std::result::Result<bool, String>;

    /// All keys and their current values, in file order.
    fn entries(&self) -> Vec<(&'static str, String)>;

    /// Checks cross-field invariants after all assignments.
    fn validate(&self) -> Result<()>;

    /// Starts from `self` (usually the defaults) and applies `text`.
    fn with_overrides(&self, text: &str, source_name: &str) -> Result<Self> {
        let mut out = self.clone();
        for entry in parse_entries(text, source_name)? {
            match out.set(&entry.key, &entry.value) {
                Ok(true) => {}
                Ok(false) => {
                    return Err(Error::Config {
                        source_name: source_name.to_string(),
                        line: entry.line,
                        message: format!("unknown key `{}`", entry.key),
                    })
                }
                Err(message) => {
                    return Err(Error::Config {
                        source_name: source_name.to_string(),
                        line: entry.line,
                        message: format!("`{}`: {message}", entry.key),
                    })
                }
            }
        }
        out.validate()?;
        Ok(out)
    }

    fn load_over(&self, path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        self.with_overrides(&text, &path.display().to_string())
    }

    fn to_kv_string(&self) -> String {
        let mut out = String::new();
        for (key, value) in self.entries() {
            let _ = writeln!(out, "{key} = {value}");
        }
        out
    }
}

pub(crate) fn parse_real<T: Real>(value: &str) -> std::result::Result<T, String> {
    let x = f64::from_str(value).map_err(|_| format!("`{value}` is not a number"))?;
    if !x.is_finite() {
        return Err(format!("`{value}` is not finite"));
    }
    Ok(T::lit(x))
}

pub(crate) fn parse_int<I: FromStr>(value: &str) -> std::result::Result<I, String> {
    value
        .parse::<I>()
        .map_err(|_| format!("`{value}` is not a valid integer"))
}

pub(crate) fn parse_bool(value: &str) -> std::result::Result<bool, String> {
    match value {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(format!("`{value}` is not a boolean")),
    }
}

pub(crate) fn fmt_real<T: Real>(x: T) -> String {
    format!("{}", x.as_f64())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_and_blanks_are_skipped() {
        let entries = parse_entries("# header\n\n a = 1 # trailing\nb=2\n", "t").unwrap();
        assert_eq!(entries.len(), 2);
        assert_eq!(entries[0].key, "a");
        assert_eq!(entries[0].value, "1");
        assert_eq!(entries[0].line, 3);
        assert_eq!(entries[1].key, "b");
    }

    #[test]
    fn malformed_lines_are_rejected() {
        assert!(parse_entries("just words\n", "t").is_err());
        assert!(parse_entries("a =\n", "t").is_err());
        assert!(parse_entries("a = 1\na = 2\n", "t").is_err());
    }

    #[test]
    fn scalar_parsers() {
        assert_eq!(parse_real::<f64>("8.4").unwrap(), 8.4);
        assert!(parse_real::<f64>("inf").is_err());
        assert!(parse_real::<f64>("x").is_err());
        assert_eq!(parse_int::<u32>("2048").unwrap(), 2048);
        assert!(parse_bool("maybe").is_err());
        assert!(parse_bool("true").unwrap());
    }
}
