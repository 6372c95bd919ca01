//! Quantum-walk Metropolis sampling with renormalization and downsampling,
//! applied to frequency-domain gravitational-wave likelihoods.
//!
//! The crate is organized bottom-up:
//!
//! - [`lattice`]: the discretized parameter hypercube and its uniform prior.
//! - [`gwsignal`]: waveforms, noise, injections and the Gaussian likelihood.
//! - [`qwalk`]: statevector simulation of the walk operator and its factors.
//! - [`qbird`]: the outer renormalization loop and posterior assembly.
//! - [`baselines`]: exact grid posteriors, a classical lattice chain and
//!   comparison statistics.

// `!(x > 0.0)` deliberately rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod error;
pub mod gwsignal;
pub mod lattice;
pub mod qbird;
pub mod qwalk;

pub use baselines::{
    brute_force_posterior, classical_mh, credible_interval, tv_distance, ChainOptions, ChainSamples, GridPosterior,
};
pub use error::{Error, Result};
pub use gwsignal::{
    FrequencyGrid, FrequencySeries, LikelihoodOracle, LogLikelihood, NoiseSpec, ParamKind, PsdModel, SourceParams,
};
pub use lattice::{LatticeGrid, LatticePoint, ParameterSpec, Shift};
pub use qbird::{run_qbird, IterationRecord, PosteriorSamples, RunConfig, SamplerSettings};
pub use qwalk::{AcceptanceTable, RegisterLayout, WalkState};
