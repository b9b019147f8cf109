//! Flat `key = value` parameter files.
//!
//! ```text
//! # comments start with '#'
//! [sym]
//! mu = -1
//! sigma = 1
//! rho = 0
//! ```

use std::collections::BTreeMap;

use crate::CliError;

pub const KEYS: &[&str] = &[
    "mu", "sigma", "rho", "mu_u", "mu_v", "sigma_u", "sigma_v", "p_u", "n", "delta", "priority_probs", "z", "z_u",
    "z_v", "seed", "horizon", "batch",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    pub regime: Option<String>,
    pub values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut out = ConfigFile::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: String| CliError::Config(format!("config line {}: {msg}", i + 1));
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                if out.regime.is_some() {
                    return Err(bad("only one [regime] header is allowed".into()));
                }
                out.regime = Some(name.trim().to_string());
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad(format!("expected key = value, found {line:?}")))?;
            let key = key.trim().replace('-', "_");
            if !KEYS.contains(&key.as_str()) {
                return Err(bad(format!("unknown key {key:?}")));
            }
            out.values.insert(key, value.trim().to_string());
        }
        Ok(out)
    }

    pub fn number(&self, key: &str) -> Result<Option<f64>, CliError> {
        self.values
            .get(key)
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|_| CliError::Config(format!("config key {key}: {v:?} is not a number")))
            })
            .transpose()
    }

    pub fn integer<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        self.values
            .get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|_| CliError::Config(format!("config key {key}: {v:?} is not a non-negative integer")))
            })
            .transpose()
    }

    pub fn list(&self, key: &str) -> Result<Option<Vec<f64>>, CliError> {
        self.values
            .get(key)
            .map(|v| {
                v.split(',')
                    .map(|x| {
                        x.trim()
                            .parse::<f64>()
                            .map_err(|_| CliError::Config(format!("config key {key}: {x:?} is not a number")))
                    })
                    .collect()
            })
            .transpose()
    }
}
