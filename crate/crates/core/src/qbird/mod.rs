//! Renormalization and downsampling around the quantum Metropolis walk.
//!
//! One outer iteration builds a `2^Q`-per-parameter lattice over the current
//! search interval, then alternates walk runs with sieving and qubit reduction
//! until one qubit per parameter remains. The final two-point marginals give a
//! mean and spread per parameter; the mean is recorded as a posterior sample and
//! both define the next search interval.

mod config;
mod metropolis;
mod run;
mod stage;

pub use config::{BetaSchedule, GridMode, RunConfig, SamplerSettings, SurvivorMode};
pub use metropolis::{quantum_metropolis, walk_marginal_trace, WalkSettings};
pub use run::{run_qbird, run_qbird_with, IterationRecord, PosteriorSamples, QbirdRun};
pub use stage::{
    reduce_qubits, reduced_width, sieve, summarize, update_interval, RenormStage, SieveResult, StageTrace,
};
