use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use serde_json::{Map, Value};

use geoflow_core::acceptance::Check;

use crate::scenario::ConfigError;

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub version: String,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    #[serde(flatten)]
    pub result: Map<String, Value>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub conventions: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<Check>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_s: Option<f64>,
}

impl Report {
    pub fn new(command: &str, seed: u64, group: Option<&str>) -> Self {
        Report {
            command: command.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            seed,
            group: group.map(Into::into),
            result: Map::new(),
            conventions: BTreeMap::new(),
            checks: Vec::new(),
            pass: true,
            runtime_s: None,
        }
    }

    pub fn set(&mut self, key: &str, v: impl Serialize) {
        self.result.insert(key.into(), serde_json::to_value(v).expect("serializable"));
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    /// Fold the checks into `pass`.
    pub fn finish(mut self) -> Self {
        self.pass = self.checks.iter().all(|c| c.pass);
        self
    }
}

#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Core(geoflow_core::Error),
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "configuration error: {e}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<geoflow_core::Error> for CliError {
    fn from(e: geoflow_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(format!("CSV export: {e}"))
    }
}
