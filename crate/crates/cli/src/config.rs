//! Run configuration.
//!
//! A config is a TOML file with one `[[parameter]]` table per inferred
//! parameter and one section per module. Every section except `[[parameter]]`
//! and `[sampler]` may be omitted.
//!
//! ```toml
//! [[parameter]]
//! name = "chirp_mass"        # chirp_mass | mass_ratio | luminosity_distance | inclination
//! lower = 19.4
//! upper = 19.6
//! unit = "Msun"              # optional
//!
//! [injection]                # truth; also fixes every parameter that is not inferred
//! chirp_mass = 19.5
//! mass_ratio = 2.0
//! luminosity_distance = 400.0  # Mpc, default 400
//! inclination = 0.0            # rad, default 0
//!
//! [waveform]                 # frequency grid in Hz
//! f_start = 20.0
//! f_end = 512.0
//! delta_f = 0.25
//!
//! [psd]                      # analytic (default) | flat | tabulated
//! kind = "analytic"
//!
//! [noise]                    # zero (default) | gaussian
//! kind = "gaussian"
//! seed = 7
//!
//! [sampler]                  # qBIRD settings; beta = 0.5 or beta = { start = 0.0, end = 0.5 }
//! qubits = 4
//! beta = 0.5
//! iterations = 300
//! burn_in = 50
//!
//! [mh]                       # classical chain
//! steps = 100000
//! seed = 1
//!
//! [grid]                     # brute-force posterior
//! qubits = 4
//!
//! [data]                     # strain CSV; relative paths resolve against the config file
//! path = "data.csv"
//!
//! [compare]
//! bins = 32
//! tv_threshold = 0.1
//! level = 0.9
//! ```
//!
//! A run manifest (`manifest-*.json`) is accepted wherever a config is: its
//! `config` snapshot is used.

use std::path::{Path, PathBuf};

use qbird_core::gwsignal::{FrequencyGrid, NoiseSpec, ParamKind, PsdModel, SourceParams};
use qbird_core::lattice::ParameterSpec;
use qbird_core::qbird::{RunConfig, SamplerSettings};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveformSection {
    pub f_start: f64,
    pub f_end: f64,
    pub delta_f: f64,
}

impl Default for WaveformSection {
    fn default() -> Self {
        Self {
            f_start: 20.0,
            f_end: 512.0,
            delta_f: 0.25,
        }
    }
}

impl WaveformSection {
    pub fn grid(&self) -> CliResult<FrequencyGrid> {
        Ok(FrequencyGrid::spanning(self.f_start, self.f_end, self.delta_f)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MhSection {
    #[serde(default = "default_mh_steps")]
    pub steps: usize,
    #[serde(default)]
    pub seed: u64,
    /// Lattice qubits per parameter; defaults to `sampler.qubits`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qubits: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantize: Option<usize>,
    #[serde(default)]
    pub burn_in: usize,
}

fn default_mh_steps() -> usize {
    100_000
}

impl Default for MhSection {
    fn default() -> Self {
        Self {
            steps: default_mh_steps(),
            seed: 0,
            qubits: None,
            quantize: None,
            burn_in: 0,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    /// Lattice qubits per parameter; defaults to `sampler.qubits`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qubits: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareSection {
    #[serde(default = "default_bins")]
    pub bins: usize,
    #[serde(default = "default_tv_threshold")]
    pub tv_threshold: f64,
    #[serde(default = "default_level")]
    pub level: f64,
}

fn default_bins() -> usize {
    32
}
fn default_tv_threshold() -> f64 {
    0.1
}
fn default_level() -> f64 {
    0.9
}

impl Default for CompareSection {
    fn default() -> Self {
        Self {
            bins: default_bins(),
            tv_threshold: default_tv_threshold(),
            level: default_level(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CliConfig {
    #[serde(rename = "parameter")]
    pub parameters: Vec<ParameterSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub injection: Option<SourceParams>,
    #[serde(default)]
    pub waveform: WaveformSection,
    #[serde(default)]
    pub psd: PsdModel,
    #[serde(default = "default_noise")]
    pub noise: NoiseSpec,
    pub sampler: SamplerSettings,
    #[serde(default)]
    pub mh: MhSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub data: DataSection,
    #[serde(default)]
    pub compare: CompareSection,
}

fn default_noise() -> NoiseSpec {
    NoiseSpec::Zero
}

/// Command-line overrides applied on top of a loaded config.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub shots: Option<usize>,
    pub qubit_cap: Option<usize>,
}

impl CliConfig {
    pub fn from_toml(text: &str) -> CliResult<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Loads a TOML config, or the config snapshot of a JSON manifest.
    /// A relative `data.path` is resolved against the file's directory.
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut cfg = if path.extension().is_some_and(|e| e == "json") {
            let manifest: crate::manifest::RunManifest = serde_json::from_str(&text)?;
            manifest.config.validate()?;
            manifest.config
        } else {
            Self::from_toml(&text)?
        };
        if let Some(data) = cfg.data.path.as_mut() {
            if data.is_relative() {
                let base = path.parent().unwrap_or(Path::new("."));
                *data = base.join(&*data);
            }
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> CliResult<String> {
        toml::to_string(self).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn validate(&self) -> CliResult<()> {
        self.run_config().validate()?;
        self.axes()?;
        if let Some(truth) = &self.injection {
            truth.validate()?;
        }
        self.waveform.grid()?;
        if self.compare.bins == 0 {
            return Err(CliError::Config("compare.bins must be positive".into()));
        }
        if !(self.compare.level > 0.0 && self.compare.level < 1.0) {
            return Err(CliError::Config("compare.level must lie in (0, 1)".into()));
        }
        Ok(())
    }

    pub fn apply(&mut self, o: Overrides) {
        if let Some(seed) = o.seed {
            self.sampler.seed = seed;
            self.mh.seed = seed;
            if let NoiseSpec::Gaussian { seed: s } = &mut self.noise {
                *s = seed;
            }
        }
        if let Some(shots) = o.shots {
            self.sampler.shots = Some(shots);
        }
        if let Some(cap) = o.qubit_cap {
            self.sampler.qubit_cap = cap;
        }
    }

    pub fn run_config(&self) -> RunConfig {
        RunConfig {
            params: self.parameters.clone(),
            sampler: self.sampler.clone(),
        }
    }

    /// Source parameter carried by each lattice axis.
    pub fn axes(&self) -> CliResult<Vec<ParamKind>> {
        Ok(self
            .parameters
            .iter()
            .map(|p| ParamKind::from_name(&p.name))
            .collect::<qbird_core::Result<_>>()?)
    }

    /// Injected source; without one, inferred parameters sit at their prior midpoints.
    pub fn base_source(&self) -> SourceParams {
        self.injection.unwrap_or_else(|| {
            let mut p = SourceParams::new(1.0, 1.0);
            for spec in &self.parameters {
                if let Ok(kind) = ParamKind::from_name(&spec.name) {
                    p.set(kind, 0.5 * (spec.lower + spec.upper));
                }
            }
            p
        })
    }

    /// β used by the classical baselines: the value at the last walk step.
    pub fn target_beta(&self) -> f64 {
        let steps = self.sampler.walk_steps.max(1);
        self.sampler.beta.at(steps - 1, steps)
    }

    /// Injected value for each inferred parameter, when an injection is configured.
    pub fn truth(&self) -> CliResult<Option<Vec<f64>>> {
        let Some(truth) = self.injection else {
            return Ok(None);
        };
        Ok(Some(self.axes()?.into_iter().map(|k| truth.get(k)).collect()))
    }

    pub fn data_path(&self, out: &Path) -> PathBuf {
        self.data.path.clone().unwrap_or_else(|| out.join("data.csv"))
    }
}
