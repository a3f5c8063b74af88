//! Flat `key = value` configuration with command-line overrides.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::fmt;

/// Every accepted key.
pub const KEYS: &[&str] = &[
    "hamiltonian",
    "eta",
    "g",
    "state",
    "alpha",
    "amplitudes",
    "kappa",
    "gt_min",
    "gt_max",
    "points",
    "tol",
    "method",
    "scheme",
    "step",
    "seed",
    "n",
    "n_states",
    "eta_xy",
    "tolerance",
    "workers",
    "count",
    "out_dir",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{}`: {}", self.key, self.message)
    }
}

pub(crate) fn config_error(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError {
        key: key.to_string(),
        message: message.into(),
    }
}

/// Parsed settings; typed getters record the values they resolve.
#[derive(Debug, Default)]
pub struct RunConfig {
    values: BTreeMap<String, String>,
    resolved: RefCell<BTreeMap<String, String>>,
}

impl RunConfig {
    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse_file(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(config_error(
                    line,
                    format!("line {}: expected `key = value`", lineno + 1),
                ));
            };
            cfg.set(k.trim(), v.trim())?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        if !KEYS.contains(&key) {
            return Err(config_error(key, "unknown key"));
        }
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    pub fn merge(&mut self, other: RunConfig) {
        self.values.extend(other.values);
    }

    pub fn contains(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    fn record(&self, key: &str, value: String) {
        self.resolved.borrow_mut().insert(key.to_string(), value);
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn string(&self, key: &str, default: &str) -> String {
        let v = self.raw(key).unwrap_or(default).to_string();
        self.record(key, v.clone());
        v
    }

    pub fn optional_string(&self, key: &str) -> Option<String> {
        let v = self.raw(key).map(str::to_string);
        if let Some(s) = &v {
            self.record(key, s.clone());
        }
        v
    }

    fn parsed<T: std::str::FromStr + ToString>(
        &self,
        key: &str,
        default: T,
    ) -> Result<T, ConfigError> {
        let v = match self.raw(key) {
            Some(s) => s
                .parse::<T>()
                .map_err(|_| config_error(key, format!("cannot parse `{s}`")))?,
            None => default,
        };
        self.record(key, v.to_string());
        Ok(v)
    }

    pub fn f64(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        let v = self.parsed(key, default)?;
        if !v.is_finite() {
            return Err(config_error(key, "must be finite"));
        }
        Ok(v)
    }

    pub fn optional_f64(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.raw(key) {
            None => Ok(None),
            Some(_) => self.f64(key, 0.0).map(Some),
        }
    }

    pub fn usize(&self, key: &str, default: usize) -> Result<usize, ConfigError> {
        self.parsed(key, default)
    }

    pub fn u64(&self, key: &str, default: u64) -> Result<u64, ConfigError> {
        self.parsed(key, default)
    }

    /// `key = value` lines of everything resolved so far.
    pub fn resolved_lines(&self) -> Vec<String> {
        self.resolved
            .borrow()
            .iter()
            .map(|(k, v)| format!("{k} = {v}"))
            .collect()
    }
}
