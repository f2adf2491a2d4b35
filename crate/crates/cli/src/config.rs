//! Flat `key=value` experiment files. Lines may carry section prefixes
//! (`arrivals.rate=3`); `#` starts a comment.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use anyhow::Context;

use crate::UsageError;

#[derive(Debug, Default, Clone, PartialEq)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config file {}", path.display()))?;
        Ok(text.parse()?)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.values.keys().map(String::as_str)
    }

    /// Flag value if given, otherwise the file value, parsed.
    pub fn pick<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, UsageError>
    where
        T: FromStr,
        T::Err: fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        self.get(key)
            .map(|raw| raw.parse().map_err(|e| UsageError(format!("config key '{key}' = '{raw}': {e}"))))
            .transpose()
    }

    /// Rejects keys outside `allowed`, so typos do not pass silently.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<(), UsageError> {
        match self.keys().find(|k| !allowed.contains(k)) {
            Some(k) => Err(UsageError(format!("unknown config key '{k}'"))),
            None => Ok(()),
        }
    }
}

impl FromStr for ConfigFile {
    type Err = UsageError;

    fn from_str(text: &str) -> Result<Self, UsageError> {
        let mut values = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) =
                line.split_once('=').ok_or_else(|| UsageError(format!("config line {}: expected key=value", n + 1)))?;
            let key = key.trim();
            if key.is_empty() {
                return Err(UsageError(format!("config line {}: empty key", n + 1)));
            }
            values.insert(key.to_string(), value.trim().to_string());
        }
        Ok(Self { values })
    }
}
