//! Run configuration: defaults, then a flat `key = value` config file, then
//! a topology file, then command-line flags. The resolved configuration is
//! echoed into every report.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use gpm_pim::pattern::Semantics;
use gpm_pim::placement::DuplicationBudget;
use gpm_pim::{PimTopology, SimOptions};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

/// Invalid flags, keys or values. Reported with exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum GraphFormat {
    #[default]
    Edgelist,
    Csr,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Emit {
    #[default]
    Json,
    Csv,
}

/// Pattern names accepted on the command line. `3mc` is the triangle plus
/// the induced wedge.
pub const PATTERN_NAMES: [&str; 7] = ["3cc", "4cc", "5cc", "3mc", "4di", "4cl", "wedge"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
pub enum Switch {
    On,
    Off,
}

impl From<Switch> for bool {
    fn from(s: Switch) -> bool {
        s == Switch::On
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub graph: Option<PathBuf>,
    pub format: GraphFormat,
    pub pattern: String,
    pub semantics: Semantics,
    pub options: SimOptions,
    pub topology: PimTopology,
    pub emit: Emit,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            graph: None,
            format: GraphFormat::Edgelist,
            pattern: "3cc".into(),
            semantics: Semantics::NonInduced,
            options: SimOptions::default(),
            topology: PimTopology::default(),
            emit: Emit::Json,
            out: None,
        }
    }
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_flat(text: &str) -> anyhow::Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| usage(format!("line {}: expected `key = value`", i + 1)))?;
        out.push((k.trim().replace('-', "_"), v.trim().to_string()));
    }
    Ok(out)
}

fn parse_value<T: FromStr>(key: &str, v: &str) -> anyhow::Result<T> {
    v.parse()
        .map_err(|_| usage(format!("bad value `{v}` for `{key}`")))
}

fn parse_switch(key: &str, v: &str) -> anyhow::Result<bool> {
    match v {
        "on" | "true" => Ok(true),
        "off" | "false" => Ok(false),
        _ => Err(usage(format!("`{key}` takes on|off, got `{v}`"))),
    }
}

pub fn check_pattern(name: &str) -> anyhow::Result<()> {
    if PATTERN_NAMES.contains(&name) {
        Ok(())
    } else {
        Err(usage(format!(
            "unknown pattern `{name}` (expected one of {})",
            PATTERN_NAMES.join(", ")
        )))
    }
}

impl RunConfig {
    /// Applies one config-file entry. Unknown keys are rejected.
    pub fn set(&mut self, key: &str, v: &str) -> anyhow::Result<()> {
        match key {
            "graph" => self.graph = Some(PathBuf::from(v)),
            "format" => {
                self.format = match v {
                    "edgelist" => GraphFormat::Edgelist,
                    "csr" => GraphFormat::Csr,
                    _ => return Err(usage(format!("bad format `{v}`"))),
                }
            }
            "pattern" => {
                check_pattern(v)?;
                self.pattern = v.to_string();
            }
            "semantics" => self.semantics = v.parse().map_err(|e| usage(format!("{e}")))?,
            "mapping" => self.options.mapping = v.parse().map_err(|e| usage(format!("{e}")))?,
            "filter" => self.options.filter = parse_switch(key, v)?,
            "duplication" => {
                self.options.duplication =
                    DuplicationBudget::from_str(v).map_err(|e| usage(format!("{e}")))?
            }
            "stealing" => self.options.stealing = parse_switch(key, v)?,
            "sample_ratio" => self.options.sample_ratio = parse_value(key, v)?,
            "seed" => self.options.seed = parse_value(key, v)?,
            "topo" => self.topology = load_topology(Path::new(v))?,
            "emit" => {
                self.emit = match v {
                    "json" => Emit::Json,
                    "csv" => Emit::Csv,
                    _ => return Err(usage(format!("bad emit format `{v}`"))),
                }
            }
            "out" => self.out = Some(PathBuf::from(v)),
            other => return Err(usage(format!("unknown config key `{other}`"))),
        }
        Ok(())
    }

    pub fn load_file(&mut self, path: &Path) -> anyhow::Result<()> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
        for (k, v) in parse_flat(&text)? {
            self.set(&k, &v)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        check_pattern(&self.pattern)?;
        self.options.validate().map_err(|e| usage(e.to_string()))?;
        self.topology.validate().map_err(|e| usage(e.to_string()))?;
        Ok(())
    }
}

/// Reads topology overrides from a flat `key = value` file. Keys are
/// [`PimTopology`] field names; anything unknown is an error.
pub fn load_topology(path: &Path) -> anyhow::Result<PimTopology> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read topology {}: {e}", path.display())))?;
    topology_from_flat(&text)
}

pub fn topology_from_flat(text: &str) -> anyhow::Result<PimTopology> {
    let mut map = Map::new();
    for (k, v) in parse_flat(text)? {
        let value = match v.as_str() {
            "on" | "true" => Value::Bool(true),
            "off" | "false" => Value::Bool(false),
            num => Value::from(parse_value::<u64>(&k, num)?),
        };
        map.insert(k, value);
    }
    serde_json::from_value(Value::Object(map)).map_err(|e| usage(format!("topology: {e}")))
}

impl fmt::Display for Emit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Emit::Json => "json",
            Emit::Csv => "csv",
        })
    }
}
