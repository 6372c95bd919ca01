use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::ParameterSpec;
use crate::qwalk::DEFAULT_QUBIT_CAP;

/// Annealing exponent applied to the likelihood ratio, per walk step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BetaSchedule {
    Constant(f64),
    /// Linear ramp from `start` at the first walk step to `end` at the last.
    Linear {
        start: f64,
        end: f64,
    },
}

impl BetaSchedule {
    pub fn at(&self, step: usize, steps: usize) -> f64 {
        match *self {
            BetaSchedule::Constant(b) => b,
            BetaSchedule::Linear { start, end } => {
                if steps <= 1 {
                    start
                } else {
                    start + (end - start) * step as f64 / (steps - 1) as f64
                }
            }
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, BetaSchedule::Constant(_))
    }

    fn validate(&self) -> Result<()> {
        let ok = |b: f64| b >= 0.0 && b.is_finite();
        let valid = match *self {
            BetaSchedule::Constant(b) => ok(b),
            BetaSchedule::Linear { start, end } => ok(start) && ok(end),
        };
        if valid {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!(
                "beta must be finite and non-negative: {self:?}"
            )))
        }
    }
}

/// How survivors are chosen when the state register shrinks.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurvivorMode {
    /// Per parameter, the values with the highest marginal probability.
    #[default]
    Marginal,
    /// Coordinates of the jointly most probable states, embedded in the
    /// smallest covering product grid.
    Joint,
}

/// How each outer iteration places its lattice values.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridMode {
    /// Endpoint-inclusive uniform grid over the current interval.
    #[default]
    Uniform,
    /// Sorted uniform random draws over the current interval.
    Random,
}

fn default_ancilla() -> usize {
    3
}
fn default_walk_steps() -> usize {
    4
}
fn default_alpha() -> f64 {
    0.5
}
fn default_lambda() -> f64 {
    2.0
}
fn default_eps_min() -> f64 {
    1e-6
}
fn default_cap() -> usize {
    DEFAULT_QUBIT_CAP
}

/// Sampler settings, independent of the parameter list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerSettings {
    /// Discretization qubits per parameter.
    pub qubits: usize,
    #[serde(default = "default_ancilla")]
    pub ancilla: usize,
    /// Walk operator applications per renormalization stage.
    #[serde(default = "default_walk_steps")]
    pub walk_steps: usize,
    pub beta: BetaSchedule,
    /// Sieve threshold relative to the most probable state.
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// Interval half-width in weighted standard deviations.
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    /// Minimum interval width as a fraction of the prior width.
    #[serde(default = "default_eps_min")]
    pub eps_min_frac: f64,
    pub iterations: usize,
    #[serde(default)]
    pub burn_in: usize,
    /// Draw this many shots from the state marginal instead of using it exactly.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shots: Option<usize>,
    #[serde(default)]
    pub survivor_mode: SurvivorMode,
    #[serde(default)]
    pub grid_mode: GridMode,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_cap")]
    pub qubit_cap: usize,
}

impl SamplerSettings {
    /// Defaults for everything except the required knobs.
    pub fn new(qubits: usize, beta: f64, iterations: usize, burn_in: usize) -> Self {
        Self {
            qubits,
            ancilla: default_ancilla(),
            walk_steps: default_walk_steps(),
            beta: BetaSchedule::Constant(beta),
            alpha: default_alpha(),
            lambda: default_lambda(),
            eps_min_frac: default_eps_min(),
            iterations,
            burn_in,
            shots: None,
            survivor_mode: SurvivorMode::default(),
            grid_mode: GridMode::default(),
            seed: 0,
            qubit_cap: default_cap(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.qubits == 0 {
            return bad("qubits must be at least 1".into());
        }
        if self.ancilla == 0 {
            return bad("ancilla must be at least 1".into());
        }
        self.beta.validate()?;
        if !(0.0..=1.0).contains(&self.alpha) {
            return bad(format!("alpha must lie in [0, 1], got {}", self.alpha));
        }
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return bad(format!("lambda must be positive, got {}", self.lambda));
        }
        if !(self.eps_min_frac > 0.0 && self.eps_min_frac <= 1.0) {
            return bad(format!("eps_min_frac must lie in (0, 1], got {}", self.eps_min_frac));
        }
        if self.iterations <= self.burn_in {
            return bad(format!(
                "iterations ({}) must exceed burn_in ({})",
                self.iterations, self.burn_in
            ));
        }
        if self.shots == Some(0) {
            return bad("shots must be positive when set".into());
        }
        Ok(())
    }
}

/// Everything a sampler run needs besides the likelihood.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub params: Vec<ParameterSpec>,
    pub sampler: SamplerSettings,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.params.is_empty() {
            return Err(Error::InvalidConfig("no parameters to infer".into()));
        }
        for (i, p) in self.params.iter().enumerate() {
            p.validate()?;
            if self.params[..i].iter().any(|q| q.name == p.name) {
                return Err(Error::InvalidConfig(format!("duplicate parameter {}", p.name)));
            }
        }
        self.sampler.validate()
    }

    pub fn num_params(&self) -> usize {
        self.params.len()
    }
}
