//! Option resolution: command line, then config file, then defaults.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use clap::parser::ValueSource;
use clap::{Arg, ArgAction, ArgMatches, Command};

pub const SEED_ENV: &str = "OCDM_SEED";

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config file or option values. Exit status 2.
    Usage(String),
    /// Failure while running. Exit status 1.
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Runtime(e)
    }
}

impl From<ocdm::Error> for CliError {
    fn from(e: ocdm::Error) -> Self {
        CliError::Runtime(e.into())
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// A valued option with an optional default shown in `--help`.
pub fn opt(name: &'static str, help: &'static str, default: Option<&'static str>) -> Arg {
    let arg = Arg::new(name).long(name).value_name("VALUE").help(help);
    match default {
        Some(d) => arg.default_value(d),
        None => arg,
    }
}

pub fn flag(name: &'static str, help: &'static str) -> Arg {
    Arg::new(name).long(name).help(help).action(ArgAction::SetTrue)
}

pub fn config_arg() -> Arg {
    Arg::new("config")
        .long("config")
        .value_name("FILE")
        .help("Read option defaults from a `key = value` file; flags take precedence")
}

/// Parses `key = value` lines. Blank lines and `#` comments are skipped.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected `key = value`", i + 1))?;
        let key = key.trim();
        if key.is_empty() {
            return Err(format!("line {}: missing key", i + 1));
        }
        if out.insert(key.to_string(), value.trim().to_string()).is_some() {
            return Err(format!("line {}: duplicate key {key:?}", i + 1));
        }
    }
    Ok(out)
}

/// Resolved option values keyed by long flag name.
#[derive(Debug, Clone)]
pub struct Params {
    values: BTreeMap<String, String>,
}

impl Params {
    pub fn resolve(cmd: &Command, matches: &ArgMatches) -> CliResult<Params> {
        let file = match matches.get_one::<String>("config") {
            Some(path) => load_config(Path::new(path))?,
            None => BTreeMap::new(),
        };
        let known: Vec<&str> = cmd
            .get_arguments()
            .filter_map(|a| a.get_long())
            .filter(|l| *l != "config")
            .collect();
        if let Some(bad) = file.keys().find(|k| !known.contains(&k.as_str())) {
            return Err(usage(format!(
                "config: unknown key {bad:?} for `{}`",
                cmd.get_name()
            )));
        }

        let mut values = BTreeMap::new();
        for name in known {
            let from_cli = matches.value_source(name) == Some(ValueSource::CommandLine);
            let raw = if from_cli {
                raw_value(matches, name)
            } else {
                file.get(name).cloned().or_else(|| raw_value(matches, name))
            };
            if let Some(v) = raw {
                values.insert(name.to_string(), v);
            }
        }
        Ok(Params { values })
    }

    #[cfg(test)]
    pub fn from_pairs(pairs: &[(&str, &str)]) -> Params {
        Params {
            values: pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
        }
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn opt<T>(&self, key: &str) -> CliResult<Option<T>>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.raw(key).map(|v| parse_value(key, v)).transpose()
    }

    pub fn get<T>(&self, key: &str) -> CliResult<T>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.opt(key)?
            .ok_or_else(|| usage(format!("missing required option --{key}")))
    }

    /// Comma-separated list; empty items are rejected.
    pub fn list<T>(&self, key: &str) -> CliResult<Vec<T>>
    where
        T: FromStr,
        T::Err: Display,
    {
        let raw = self
            .raw(key)
            .ok_or_else(|| usage(format!("missing required option --{key}")))?;
        raw.split(',').map(|item| parse_value(key, item.trim())).collect()
    }

    pub fn flag(&self, key: &str) -> CliResult<bool> {
        match self.raw(key) {
            None => Ok(false),
            Some(v) => match v.to_ascii_lowercase().as_str() {
                "true" | "yes" | "1" => Ok(true),
                "false" | "no" | "0" => Ok(false),
                _ => Err(usage(format!("invalid value {v:?} for --{key}: expected true or false"))),
            },
        }
    }

    /// Seeds from `key`, else the `OCDM_SEED` environment variable, else 0.
    pub fn seeds(&self, key: &str) -> CliResult<Vec<u64>> {
        if self.raw(key).is_some() {
            return self.list(key);
        }
        match std::env::var(SEED_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map(|s| vec![s])
                .map_err(|e| usage(format!("invalid {SEED_ENV} value {v:?}: {e}"))),
            Err(_) => Ok(vec![0]),
        }
    }

    pub fn seed(&self, key: &str) -> CliResult<u64> {
        let seeds = self.seeds(key)?;
        match seeds.as_slice() {
            [s] => Ok(*s),
            _ => Err(usage(format!("--{key} takes a single seed"))),
        }
    }
}

fn raw_value(matches: &ArgMatches, name: &str) -> Option<String> {
    let raw = matches.get_raw(name)?;
    let parts: Vec<String> = raw.map(|v| v.to_string_lossy().into_owned()).collect();
    (!parts.is_empty()).then(|| parts.join(","))
}

fn parse_value<T>(key: &str, v: &str) -> CliResult<T>
where
    T: FromStr,
    T::Err: Display,
{
    v.parse()
        .map_err(|e| usage(format!("invalid value {v:?} for --{key}: {e}")))
}

fn load_config(path: &Path) -> CliResult<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| usage(format!("config {}: {e}", path.display())))
}
