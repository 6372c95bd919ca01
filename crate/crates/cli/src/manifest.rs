use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::CliConfig;
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Seeds {
    pub sampler: u64,
    pub mh: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<u64>,
}

impl Seeds {
    pub fn of(cfg: &CliConfig) -> Self {
        Self {
            sampler: cfg.sampler.seed,
            mh: cfg.mh.seed,
            noise: match cfg.noise {
                qbird_core::NoiseSpec::Gaussian { seed } => Some(seed),
                qbird_core::NoiseSpec::Zero => None,
            },
        }
    }
}

/// Record of one command invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    /// Effective config after overrides, with the data path made absolute.
    pub config: CliConfig,
    pub seeds: Seeds,
    pub outputs: BTreeMap<String, PathBuf>,
    pub timings_ms: BTreeMap<String, f64>,
}

impl RunManifest {
    pub fn new(command: impl Into<String>, config: &CliConfig) -> Self {
        Self {
            command: command.into(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: config.clone(),
            seeds: Seeds::of(config),
            outputs: BTreeMap::new(),
            timings_ms: BTreeMap::new(),
        }
    }

    pub fn file_name(&self) -> String {
        format!("manifest-{}.json", self.command)
    }

    /// Writes the manifest into `out` and returns its path. Every listed
    /// output must already exist.
    pub fn write(&mut self, out: &Path) -> CliResult<PathBuf> {
        for (name, path) in &self.outputs {
            if !path.exists() {
                return Err(CliError::Missing(format!(
                    "output {name} was not written: {}",
                    path.display()
                )));
            }
        }
        let path = out.join(self.file_name());
        self.outputs.insert("manifest".into(), path.clone());
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(&path, text + "\n").map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}
