//! Plain `key = value` configuration files. Keys are the long flag names.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

const KEYS: [&str; 15] = [
    "state",
    "vd",
    "ve",
    "t",
    "w",
    "det",
    "rec",
    "sweep",
    "range",
    "steps",
    "spacing",
    "format",
    "out",
    "clamp-negative",
    "tol",
];

#[derive(Debug, Default)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Config, CliError> {
        let Some(path) = path else {
            return Ok(Config::default());
        };
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("reading {}: {e}", path.display())))?;
        Config::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Config, CliError> {
        let mut values = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::usage(format!("config line {}: expected key = value", n + 1)));
            };
            let key = key.trim().trim_start_matches("--").replace('_', "-");
            if !KEYS.contains(&key.as_str()) {
                return Err(CliError::usage(format!("config line {}: unknown key `{key}`", n + 1)));
            }
            values.insert(key, value.trim().to_string());
        }
        Ok(Config { values })
    }

    pub fn get<T>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        self.values
            .get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| CliError::usage(format!("config key `{key}`: {e}")))
            })
            .transpose()
    }

    /// The flag value when given, otherwise the config value.
    pub fn pick<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.get(key),
        }
    }
}
