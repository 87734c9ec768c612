use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use clap::CommandFactory;
use serde::de::DeserializeOwned;

use crate::args::Cli;
use crate::CliError;

/// Option values from a flat TOML file. Keys are flag names with
/// underscores (`learning_rate = 0.01`); flags given on the command line win.
#[derive(Debug, Default)]
pub struct Config {
    table: toml::Table,
}

/// Every option name accepted anywhere on the command line.
fn known_keys() -> BTreeSet<String> {
    let root = Cli::command();
    let mut keys = BTreeSet::new();
    let mut add = |cmd: &clap::Command| {
        for a in cmd.get_arguments() {
            if a.get_long().is_some() {
                keys.insert(a.get_id().as_str().to_string());
            }
        }
    };
    add(&root);
    for sub in root.get_subcommands() {
        add(sub);
    }
    keys.remove("config");
    keys.remove("help");
    keys.remove("version");
    keys
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| textcode::Error::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Lib(textcode::Error::Parse { message, .. }) => {
                CliError::Lib(textcode::Error::parse(path.display(), message))
            }
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| textcode::Error::parse("config file", e.message()))?;
        let known = known_keys();
        for (key, value) in &table {
            if value.is_table() {
                return Err(CliError::Usage(format!("config file must be flat, [{key}] is a table")));
            }
            if !known.contains(key) {
                return Err(CliError::Usage(format!("unknown config key {key:?}")));
            }
        }
        Ok(Self { table })
    }

    /// The flag value if given, else the config value, else `None`.
    pub fn pick<T: DeserializeOwned>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.table.get(key) {
            None => Ok(None),
            Some(v) => v
                .clone()
                .try_into()
                .map(Some)
                .map_err(|e: toml::de::Error| CliError::Usage(format!("config key {key}: {}", e.message().trim()))),
        }
    }

    pub fn or<T: DeserializeOwned>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, CliError> {
        Ok(self.pick(flag, key)?.unwrap_or(default))
    }

    pub fn need<T: DeserializeOwned>(&self, flag: Option<T>, key: &str) -> Result<T, CliError> {
        self.pick(flag, key)?
            .ok_or_else(|| CliError::Usage(format!("missing --{}", key.replace('_', "-"))))
    }

    pub fn flag(&self, flag: bool, key: &str) -> Result<bool, CliError> {
        Ok(flag || self.pick(None, key)?.unwrap_or(false))
    }
}
