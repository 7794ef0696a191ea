//! Gateway configuration, read from `--config` or `CLEM_CONFIG`.

use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::Context;
use clem_core::backends::ApiConfig;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub instances_dir: PathBuf,
    pub resources_dir: PathBuf,
    pub results_dir: PathBuf,
    pub api: Option<ApiConfig>,
    /// Where live sessions are snapshotted. No snapshots when unset.
    pub snapshot_dir: Option<PathBuf>,
    /// How long a human seat may think. Unbounded when unset.
    pub human_timeout_secs: Option<u64>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            instances_dir: "in".into(),
            resources_dir: "resources".into(),
            results_dir: "results".into(),
            api: None,
            snapshot_dir: None,
            human_timeout_secs: None,
        }
    }
}

impl Config {
    pub fn load(path: Option<&Path>) -> anyhow::Result<Config> {
        let Some(path) = path else { return Ok(Config::default()) };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn human_timeout(&self) -> Option<Duration> {
        self.human_timeout_secs.map(Duration::from_secs)
    }
}
