//! JSON run configuration. Flags given on the command line win over the
//! file.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde_json::{Map, Value};

use crate::error::{CliError, CliResult};

#[derive(Debug, Default, Clone)]
pub struct Settings {
    values: Map<String, Value>,
}

impl Settings {
    /// Reads a config file. Accepts flat keys, a nested `params` object, and
    /// the aliases `input_path` / `output_path` for `file` / `output`. A
    /// `subcommand` key must agree with the one being run.
    pub fn load(path: Option<&Path>, subcommand: &str) -> CliResult<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::validation(format!("cannot read config {}: {e}", path.display())))?;
        let root: Value = serde_json::from_str(&text)
            .map_err(|e| CliError::validation(format!("config {} is not valid JSON: {e}", path.display())))?;
        let Value::Object(root) = root else {
            return Err(CliError::validation("config must be a JSON object"));
        };
        let mut values = Map::new();
        for (key, value) in root {
            match key.as_str() {
                "params" => {
                    let Value::Object(inner) = value else {
                        return Err(CliError::validation("config key `params` must be an object"));
                    };
                    for (k, v) in inner {
                        values.insert(normalize(&k), v);
                    }
                }
                "subcommand" => {
                    if value.as_str() != Some(subcommand) {
                        return Err(CliError::validation(format!(
                            "config is for subcommand {value}, but `{subcommand}` was run"
                        )));
                    }
                }
                "input_path" => {
                    values.insert("file".into(), value);
                }
                "output_path" => {
                    values.insert("output".into(), value);
                }
                _ => {
                    values.insert(normalize(&key), value);
                }
            }
        }
        Ok(Self { values })
    }

    pub fn get<T: DeserializeOwned>(&self, flag: Option<T>, key: &str) -> CliResult<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.values.get(&normalize(key)) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => serde_json::from_value(v.clone())
                .map(Some)
                .map_err(|e| CliError::validation(format!("config key `{key}`: {e}"))),
        }
    }

    pub fn require<T: DeserializeOwned>(&self, flag: Option<T>, key: &str) -> CliResult<T> {
        self.get(flag, key)?.ok_or_else(|| {
            CliError::validation(format!("missing required parameter `--{}`", key.replace('_', "-")))
        })
    }

    pub fn or<T: DeserializeOwned>(&self, flag: Option<T>, key: &str, default: T) -> CliResult<T> {
        Ok(self.get(flag, key)?.unwrap_or(default))
    }

    pub fn flag(&self, flag: bool, key: &str) -> CliResult<bool> {
        Ok(flag || self.get::<bool>(None, key)?.unwrap_or(false))
    }

    pub fn path(&self, flag: Option<PathBuf>, key: &str) -> CliResult<Option<PathBuf>> {
        self.get(flag, key)
    }
}

fn normalize(key: &str) -> String {
    key.replace('-', "_")
}
