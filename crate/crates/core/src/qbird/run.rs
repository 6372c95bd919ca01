use std::io::Write;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::{GridMode, RunConfig};
use super::metropolis::{quantum_metropolis, WalkSettings};
use super::stage::{reduce_qubits, sieve, summarize, update_interval, RenormStage, StageTrace};
use crate::error::{Error, Result};
use crate::gwsignal::LogLikelihood;
use crate::lattice::{LatticeGrid, ParameterSpec};
use crate::qwalk::RegisterLayout;

/// Summary of one outer iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub beta: f64,
    pub walk_steps: usize,
    /// Search interval the iteration's lattice was built on.
    pub intervals: Vec<(f64, f64)>,
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
    /// One entry per qubit reduction.
    pub stages: Vec<StageTrace>,
    pub wall_ms: f64,
}

/// Per-iteration means after burn-in.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorSamples {
    pub names: Vec<String>,
    /// Iteration index of each retained sample.
    pub iterations: Vec<usize>,
    /// `values[p][k]` is parameter `p` at retained sample `k`.
    pub values: Vec<Vec<f64>>,
    pub burn_in: usize,
    pub config: RunConfig,
}

impl PosteriorSamples {
    pub fn len(&self) -> usize {
        self.iterations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.iterations.is_empty()
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|p| self.values[p].as_slice())
    }

    /// Writes `iteration,<param_1>,...,<param_P>` rows.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["iteration".to_string()];
        header.extend(self.names.iter().cloned());
        w.write_record(&header)?;
        for (k, it) in self.iterations.iter().enumerate() {
            let mut row = vec![it.to_string()];
            row.extend(self.values.iter().map(|col| col[k].to_string()));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QbirdRun {
    pub samples: PosteriorSamples,
    pub records: Vec<IterationRecord>,
}

/// Builds the iteration lattice over the current search intervals.
fn iteration_grid(cfg: &RunConfig, intervals: &[(f64, f64)], rng: &mut ChaCha8Rng) -> Result<LatticeGrid> {
    let specs = cfg
        .params
        .iter()
        .zip(intervals)
        .map(|(p, &(lo, hi))| p.with_bounds(lo, hi))
        .collect::<Result<Vec<ParameterSpec>>>()?;
    let qubits = vec![cfg.sampler.qubits; specs.len()];
    match cfg.sampler.grid_mode {
        GridMode::Uniform => LatticeGrid::uniform(&specs, &qubits),
        GridMode::Random => LatticeGrid::random(&specs, &qubits, rng),
    }
}

/// Runs the full sampler, calling `observe` after every outer iteration.
pub fn run_qbird_with<F>(cfg: &RunConfig, ll: &dyn LogLikelihood, mut observe: F) -> Result<QbirdRun>
where
    F: FnMut(&IterationRecord),
{
    cfg.validate()?;
    let settings = &cfg.sampler;
    let layout = RegisterLayout::uniform(cfg.num_params(), settings.qubits, settings.ancilla)?;
    layout.check_cap(settings.qubit_cap)?;
    let walk = WalkSettings {
        walk_steps: settings.walk_steps,
        beta: settings.beta,
        ancilla: settings.ancilla,
        qubit_cap: settings.qubit_cap,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let mut intervals: Vec<(f64, f64)> = cfg.params.iter().map(|p| (p.lower, p.upper)).collect();
    let mut records = Vec::with_capacity(settings.iterations);

    for iteration in 0..settings.iterations {
        let start = Instant::now();
        let mut stage = RenormStage::new(iteration_grid(cfg, &intervals, &mut rng)?);
        let mut traces = Vec::new();
        let probs = loop {
            let probs = quantum_metropolis(&stage.grid, ll, &walk, settings.shots, &mut rng)?;
            if stage.is_final() {
                break probs;
            }
            let sieved = sieve(&probs, settings.alpha)?;
            let (next, trace) = reduce_qubits(&stage, &sieved, &probs, settings.survivor_mode)?;
            debug_assert!(trace.s_next < trace.s);
            traces.push(trace);
            stage = next;
        };
        let summary = summarize(&stage.grid, &probs)?;
        let record = IterationRecord {
            iteration,
            beta: settings.beta.at(0, settings.walk_steps),
            walk_steps: settings.walk_steps,
            intervals: intervals.clone(),
            means: summary.iter().map(|s| s.0).collect(),
            stds: summary.iter().map(|s| s.1).collect(),
            stages: traces,
            wall_ms: start.elapsed().as_secs_f64() * 1e3,
        };
        intervals = cfg
            .params
            .iter()
            .zip(&summary)
            .map(|(prior, &(mean, std))| update_interval(prior, mean, std, settings.lambda, settings.eps_min_frac))
            .collect::<Result<_>>()?;
        observe(&record);
        records.push(record);
    }

    let kept = &records[settings.burn_in..];
    if kept.is_empty() {
        return Err(Error::InvalidConfig("no samples left after burn-in".into()));
    }
    let samples = PosteriorSamples {
        names: cfg.params.iter().map(|p| p.name.clone()).collect(),
        iterations: kept.iter().map(|r| r.iteration).collect(),
        values: (0..cfg.num_params())
            .map(|p| kept.iter().map(|r| r.means[p]).collect())
            .collect(),
        burn_in: settings.burn_in,
        config: cfg.clone(),
    };
    Ok(QbirdRun { samples, records })
}

pub fn run_qbird(cfg: &RunConfig, ll: &dyn LogLikelihood) -> Result<QbirdRun> {
    run_qbird_with(cfg, ll, |_| {})
}
