use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use clap::{Args, ValueEnum};
use ggq::graph::EnumerateOptions;
use ggq::matcher::MatchConfig;
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
    Dot,
}

/// Settings shared by every subcommand. Flags win over environment
/// variables, which win over the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// TOML file with default settings.
    #[arg(long, global = true, env = "GGQ_CONFIG")]
    pub config: Option<std::path::PathBuf>,
    /// Longest walk explored by the bounded search.
    #[arg(long, global = true, env = "GGQ_MAX_WALK_LEN")]
    pub max_walk_len: Option<usize>,
    /// Largest subgraph considered by enumeration and the oracles.
    #[arg(long, global = true, env = "GGQ_MAX_NODES")]
    pub max_nodes: Option<usize>,
    /// Abort once this many subgraphs have been produced.
    #[arg(long, global = true, env = "GGQ_YIELD_CAP")]
    pub yield_cap: Option<usize>,
    /// Only enumerate weakly connected subgraphs.
    #[arg(long, global = true, env = "GGQ_CONNECTED_ONLY")]
    pub connected_only: Option<bool>,
    /// Include the empty subgraph in enumeration.
    #[arg(long, global = true, env = "GGQ_INCLUDE_EMPTY")]
    pub include_empty: Option<bool>,
    /// Evaluate every edge predicate by bounded walk search.
    #[arg(long, global = true, env = "GGQ_ORACLE_MODE")]
    pub oracle_mode: Option<bool>,
    #[arg(long, global = true, env = "GGQ_FORMAT", value_enum)]
    pub format: Option<OutputFormat>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct FileConfig {
    max_walk_len: Option<usize>,
    max_nodes: Option<usize>,
    yield_cap: Option<usize>,
    connected_only: Option<bool>,
    include_empty: Option<bool>,
    oracle_mode: Option<bool>,
    format: Option<OutputFormat>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CliConfig {
    pub max_walk_len: usize,
    pub max_nodes: usize,
    pub yield_cap: usize,
    pub connected_only: bool,
    pub include_empty: bool,
    pub oracle_mode: bool,
    pub format: OutputFormat,
}

impl Default for CliConfig {
    fn default() -> Self {
        let m = MatchConfig::default();
        let e = EnumerateOptions::default();
        CliConfig {
            max_walk_len: m.max_walk_len,
            max_nodes: e.max_nodes,
            yield_cap: m.yield_cap,
            connected_only: e.connected_only,
            include_empty: e.include_empty,
            oracle_mode: m.oracle_mode,
            format: OutputFormat::Text,
        }
    }
}

impl CliConfig {
    pub fn resolve(o: &Overrides) -> Result<Self> {
        let file = match &o.config {
            Some(path) => load_file(path)?,
            None => FileConfig::default(),
        };
        let d = CliConfig::default();
        Ok(CliConfig {
            max_walk_len: o
                .max_walk_len
                .or(file.max_walk_len)
                .unwrap_or(d.max_walk_len),
            max_nodes: o.max_nodes.or(file.max_nodes).unwrap_or(d.max_nodes),
            yield_cap: o.yield_cap.or(file.yield_cap).unwrap_or(d.yield_cap),
            connected_only: o
                .connected_only
                .or(file.connected_only)
                .unwrap_or(d.connected_only),
            include_empty: o
                .include_empty
                .or(file.include_empty)
                .unwrap_or(d.include_empty),
            oracle_mode: o.oracle_mode.or(file.oracle_mode).unwrap_or(d.oracle_mode),
            format: o.format.or(file.format).unwrap_or(d.format),
        })
    }

    pub fn match_config(&self) -> MatchConfig {
        MatchConfig {
            max_walk_len: self.max_walk_len,
            oracle_mode: self.oracle_mode,
            yield_cap: self.yield_cap,
        }
    }

    pub fn enumerate_options(&self) -> EnumerateOptions {
        EnumerateOptions {
            max_nodes: self.max_nodes,
            include_empty: self.include_empty,
            connected_only: self.connected_only,
            yield_cap: self.yield_cap,
        }
    }
}

fn load_file(path: &Path) -> Result<FileConfig> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
}
