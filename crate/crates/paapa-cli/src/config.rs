//! Flat `key=value` config files mirroring the command-line flags.
//!
//! Lines are `key=value` with `#` comments and blank lines allowed; keys use
//! the long flag names (`m`, `p`, `t`, `variant`, `seed`, `replicas`,
//! `checkpoints`, `out`, `kmax`, `p-list`, `edge-list`, ...). Values given on
//! the command line always win over the file.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::CliError;

#[derive(Debug, Default)]
pub struct Config {
    values: HashMap<String, String>,
}

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Config::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
        let mut values = HashMap::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Usage(format!(
                    "config {} line {}: expected key=value, got `{line}`",
                    path.display(),
                    idx + 1
                )));
            };
            values.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(Config { values })
    }

    /// Flag value if present, else the config value parsed as `T`.
    pub fn resolve<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.values.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|e| {
                CliError::Usage(format!("config key `{key}`: cannot parse `{raw}`: {e}"))
            }),
        }
    }

    /// Like [`Config::resolve`] but with a default when neither source has
    /// the key.
    pub fn resolve_or<T>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, CliError>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        Ok(self.resolve(flag, key)?.unwrap_or(default))
    }

    /// Like [`Config::resolve`] but required.
    pub fn require<T>(&self, flag: Option<T>, key: &str) -> Result<T, CliError>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        self.resolve(flag, key)?
            .ok_or_else(|| CliError::Usage(format!("missing required option `--{key}`")))
    }

    /// Boolean flags: a bare CLI flag wins; otherwise the config key must be
    /// `true`/`false`/`1`/`0`.
    pub fn resolve_bool(&self, flag: bool, key: &str) -> Result<bool, CliError> {
        if flag {
            return Ok(true);
        }
        match self.values.get(key).map(String::as_str) {
            None => Ok(false),
            Some("true") | Some("1") => Ok(true),
            Some("false") | Some("0") => Ok(false),
            Some(other) => Err(CliError::Usage(format!(
                "config key `{key}`: expected true/false, got `{other}`"
            ))),
        }
    }
}

/// Comma-separated list of `T`, used for `--checkpoints` and `--p-list`.
#[derive(Debug, Clone)]
pub struct CommaList<T>(pub Vec<T>);

impl<T> FromStr for CommaList<T>
where
    T: FromStr,
    T::Err: std::fmt::Display,
{
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split(',')
            .filter(|part| !part.trim().is_empty())
            .map(|part| part.trim().parse::<T>().map_err(|e| format!("`{part}`: {e}")))
            .collect::<Result<Vec<_>, _>>()
            .map(CommaList)
    }
}

/// Where outputs land; created on demand.
pub fn ensure_out_dir(out: &Path) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(out)
        .map_err(|e| CliError::Io(format!("cannot create output dir {}: {e}", out.display())))?;
    Ok(out.to_path_buf())
}
