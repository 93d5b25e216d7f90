//! Flat `key = value` configuration files with `#` comments.

use std::path::Path;
use std::str::FromStr;

use indexmap::IndexMap;

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KeyValues {
    entries: IndexMap<String, String>,
}

impl KeyValues {
    pub fn parse(text: &str, source: &Path) -> Result<Self> {
        let mut entries = IndexMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(source, i + 1, "expected `key = value`"))?;
            let k = k.trim();
            if k.is_empty() {
                return Err(Error::parse(source, i + 1, "empty key"));
            }
            entries.insert(k.to_string(), v.trim().to_string());
        }
        Ok(KeyValues { entries })
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn insert(&mut self, key: &str, value: impl ToString) {
        self.entries.insert(key.to_string(), value.to_string());
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Parses `key` if present, otherwise returns `default`.
    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.entries.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| Error::config(key, format!("cannot parse `{v}`"))),
        }
    }

    /// Fails with a config error naming the first key not in `known`.
    pub fn reject_unknown(&self, known: &[&str]) -> Result<()> {
        match self.keys().find(|k| !known.contains(k)) {
            Some(k) => Err(Error::config(k, "unknown key")),
            None => Ok(()),
        }
    }

    pub fn to_text(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_values() {
        let kv = KeyValues::parse("# header\nrho = 0.9  # skew\nseed=3\n\n", Path::new("x")).unwrap();
        assert_eq!(kv.get_or("rho", 0.0).unwrap(), 0.9);
        assert_eq!(kv.get_or("seed", 0u64).unwrap(), 3);
        assert_eq!(kv.get_or("missing", 7usize).unwrap(), 7);
    }

    #[test]
    fn errors_name_line_or_field() {
        assert!(matches!(KeyValues::parse("a = 1\nnonsense\n", Path::new("x")), Err(Error::Parse { line: 2, .. })));
        let kv = KeyValues::parse("rho = high\n", Path::new("x")).unwrap();
        match kv.get_or("rho", 0.0f64) {
            Err(Error::Config { field, .. }) => assert_eq!(field, "rho"),
            other => panic!("{other:?}"),
        }
        assert!(kv.reject_unknown(&["seed"]).is_err());
    }
}
