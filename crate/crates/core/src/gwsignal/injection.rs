use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::psd::PsdModel;
use super::series::{FrequencyGrid, FrequencySeries};
use super::waveform::{SourceParams, WaveformModel};
use crate::error::Result;

/// Detector noise added to an injected signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseSpec {
    Zero,
    /// Complex Gaussian noise; each real and imaginary component has
    /// variance `S_n(f) / (4 delta_f)`.
    Gaussian {
        seed: u64,
    },
}

/// Noise realization on `grid` (all zeros for [`NoiseSpec::Zero`]).
pub fn noise_series(psd: &PsdModel, noise: NoiseSpec, grid: &FrequencyGrid) -> Result<FrequencySeries> {
    let sn = psd.on_grid(grid)?;
    match noise {
        NoiseSpec::Zero => Ok(FrequencySeries::zeros(*grid)),
        NoiseSpec::Gaussian { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let values = sn
                .iter()
                .map(|s| {
                    let sigma = (s / (4.0 * grid.delta_f)).sqrt();
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    Complex64::new(sigma * re, sigma * im)
                })
                .collect();
            FrequencySeries::new(*grid, values)
        }
    }
}

/// `d = h(truth) + n`.
pub fn generate_injection(
    model: &dyn WaveformModel,
    truth: &SourceParams,
    psd: &PsdModel,
    noise: NoiseSpec,
    grid: &FrequencyGrid,
) -> Result<FrequencySeries> {
    let mut data = model.strain(truth, grid)?;
    let n = noise_series(psd, noise, grid)?;
    if let NoiseSpec::Gaussian { .. } = noise {
        for (d, n) in data.values_mut().iter_mut().zip(n.values()) {
            *d += n;
        }
    }
    Ok(data)
}
