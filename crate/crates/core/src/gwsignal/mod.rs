//! Frequency-domain signals, noise and the Gaussian likelihood.

mod injection;
mod likelihood;
mod psd;
mod series;
mod waveform;

pub use injection::{generate_injection, noise_series, NoiseSpec};
pub use likelihood::{
    acceptance_probability, gaussian_log_likelihood, log_likelihood_on_grid, LikelihoodOracle, LogLikelihood,
};
pub use psd::PsdModel;
pub use series::{FrequencyGrid, FrequencySeries};
pub use waveform::{
    symmetric_mass_ratio, toy_waveform, ParamKind, SourceParams, ToyInspiral, WaveformModel, DEFAULT_DISTANCE_MPC,
    DEFAULT_INCLINATION, MPC_METERS, MSUN_SECONDS, SPEED_OF_LIGHT,
};
