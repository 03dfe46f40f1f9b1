//! Flat `key = value` configuration text.
//!
//! One entry per line, `#` starts a comment, keys carry a module prefix such
//! as `solver.gamma`. Keys may not repeat.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct KeyValues {
    entries: BTreeMap<String, String>,
}

impl KeyValues {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected `key = value`", lineno + 1)))?;
            let key = key.trim().to_string();
            if key.is_empty() {
                return Err(Error::Parse(format!("line {}: empty key", lineno + 1)));
            }
            if entries.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(Error::config(key, "key given more than once"));
            }
        }
        Ok(Self { entries })
    }

    pub fn insert(&mut self, key: impl Into<String>, value: impl Display) {
        self.entries.insert(key.into(), value.to_string());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    /// Parses `key` if present.
    pub fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: Display,
    {
        self.get(key)
            .map(|v| v.parse::<T>().map_err(|e| Error::config(key, format!("cannot parse `{v}`: {e}"))))
            .transpose()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Entries under `prefix.`, with the prefix stripped.
    pub fn section(&self, prefix: &str) -> KeyValues {
        let lead = format!("{prefix}.");
        KeyValues {
            entries: self
                .entries
                .iter()
                .filter_map(|(k, v)| k.strip_prefix(&lead).map(|rest| (rest.to_string(), v.clone())))
                .collect(),
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
    fn parse_comments_and_sections() {
        let kv = KeyValues::parse("# header\nsolver.gamma = 4 # inline\n\nsolver.tau=0.5\nplan.seeds = 3\n").unwrap();
        assert_eq!(kv.get("solver.gamma"), Some("4"));
        assert_eq!(kv.parsed::<f64>("solver.tau").unwrap(), Some(0.5));
        let s = kv.section("solver");
        assert_eq!(s.keys().collect::<Vec<_>>(), vec!["gamma", "tau"]);
    }

    #[test]
    fn errors_name_the_key() {
        assert!(KeyValues::parse("novalue\n").is_err());
        match KeyValues::parse("a = 1\na = 2").unwrap_err() {
            Error::Config { key, .. } => assert_eq!(key, "a"),
            e => panic!("{e}"),
        }
        let kv = KeyValues::parse("solver.gamma = four").unwrap();
        match kv.parsed::<f64>("solver.gamma").unwrap_err() {
            Error::Config { key, .. } => assert_eq!(key, "solver.gamma"),
            e => panic!("{e}"),
        }
    }
}
