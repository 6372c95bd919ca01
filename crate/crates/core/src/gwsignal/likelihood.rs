use std::collections::HashMap;

use num_complex::Complex64;
use parking_lot::RwLock;

use super::psd::PsdModel;
use super::series::FrequencySeries;
use super::waveform::{ParamKind, SourceParams, WaveformModel};
use crate::error::{Error, Result};
use crate::lattice::{LatticeGrid, LatticePoint};

/// Smallest exponent passed to `exp` when forming acceptance probabilities.
const MIN_LOG_ACCEPTANCE: f64 = -745.0;

/// Log-likelihood over a vector of parameter values in lattice-axis order.
pub trait LogLikelihood: Sync {
    fn log_likelihood(&self, values: &[f64]) -> Result<f64>;
}

impl<F> LogLikelihood for F
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    fn log_likelihood(&self, values: &[f64]) -> Result<f64> {
        Ok(self(values))
    }
}

/// Log-likelihood at every flat label of `grid`, evaluated in parallel.
pub fn log_likelihood_on_grid(ll: &dyn LogLikelihood, grid: &LatticeGrid) -> Result<Vec<f64>> {
    use rayon::prelude::*;
    (0..grid.len())
        .into_par_iter()
        .map(|label| ll.log_likelihood(&grid.values_at(label)))
        .collect()
}

/// Gaussian quadratic form `-1/2 sum_i |d_i - h_i|^2 / S_i`.
pub fn gaussian_log_likelihood(data: &[Complex64], model: &[Complex64], psd: &[f64]) -> Result<f64> {
    if data.len() != model.len() || data.len() != psd.len() {
        return Err(Error::GridMismatch(format!(
            "{} data nodes, {} model nodes, {} PSD nodes",
            data.len(),
            model.len(),
            psd.len()
        )));
    }
    let sum: f64 = data
        .iter()
        .zip(model)
        .zip(psd)
        .map(|((d, h), s)| (d - h).norm_sqr() / s)
        .sum();
    Ok(-0.5 * sum)
}

/// Metropolis-Hastings acceptance `min[1, prior_ratio * exp(beta * delta_loglik)]`
/// evaluated in log space.
pub fn acceptance_probability(log_prior_ratio: f64, delta_loglik: f64, beta: f64) -> Result<f64> {
    if !(beta >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "beta must be non-negative, got {beta}"
        )));
    }
    let tempered = if beta == 0.0 { 0.0 } else { beta * delta_loglik };
    let exponent = log_prior_ratio + tempered;
    if exponent.is_nan() {
        return Err(Error::InvalidParameter("acceptance exponent is NaN".into()));
    }
    if exponent >= 0.0 {
        Ok(1.0)
    } else {
        Ok(exponent.max(MIN_LOG_ACCEPTANCE).exp())
    }
}

/// Likelihood of observed strain under a waveform model and noise PSD, with
/// a memo table keyed by the exact parameter values.
pub struct LikelihoodOracle {
    data: FrequencySeries,
    inv_psd: Vec<f64>,
    model: Box<dyn WaveformModel>,
    axes: Vec<ParamKind>,
    base: SourceParams,
    cache: RwLock<HashMap<Vec<u64>, f64>>,
}

impl std::fmt::Debug for LikelihoodOracle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LikelihoodOracle")
            .field("nodes", &self.data.len())
            .field("axes", &self.axes)
            .field("base", &self.base)
            .field("cached", &self.cache.read().len())
            .finish()
    }
}

impl LikelihoodOracle {
    /// `axes` names the source parameter carried by each lattice axis; all
    /// other parameters are taken from `base`.
    pub fn new(
        data: FrequencySeries,
        psd: &PsdModel,
        model: Box<dyn WaveformModel>,
        axes: Vec<ParamKind>,
        base: SourceParams,
    ) -> Result<Self> {
        let inv_psd = psd.on_grid(data.grid())?.into_iter().map(|s| 1.0 / s).collect();
        for (i, a) in axes.iter().enumerate() {
            if axes[..i].contains(a) {
                return Err(Error::InvalidParameter(format!("axis {} listed twice", a.name())));
            }
        }
        Ok(Self {
            data,
            inv_psd,
            model,
            axes,
            base,
            cache: RwLock::new(HashMap::new()),
        })
    }

    pub fn data(&self) -> &FrequencySeries {
        &self.data
    }

    pub fn axes(&self) -> &[ParamKind] {
        &self.axes
    }

    pub fn source_params(&self, values: &[f64]) -> Result<SourceParams> {
        if values.len() != self.axes.len() {
            return Err(Error::LengthMismatch {
                what: "values vs likelihood axes",
                left: values.len(),
                right: self.axes.len(),
            });
        }
        let mut p = self.base;
        for (&kind, &v) in self.axes.iter().zip(values) {
            p.set(kind, v);
        }
        Ok(p)
    }

    /// Uncached log-likelihood of a full source parameter set.
    pub fn evaluate(&self, params: &SourceParams) -> Result<f64> {
        let h = self.model.strain(params, self.data.grid())?;
        self.data.check_same_grid(&h)?;
        let sum: f64 = self
            .data
            .values()
            .iter()
            .zip(h.values())
            .zip(&self.inv_psd)
            .map(|((d, h), w)| (d - h).norm_sqr() * w)
            .sum();
        Ok(-0.5 * sum)
    }

    /// Log-likelihood at a lattice point of `grid`.
    pub fn at_point(&self, grid: &LatticeGrid, point: &LatticePoint) -> Result<f64> {
        self.log_likelihood(&grid.point_values(point)?)
    }

    /// Acceptance for the move `from -> to` on `grid`.
    pub fn acceptance(&self, grid: &LatticeGrid, from: &LatticePoint, to: &LatticePoint, beta: f64) -> Result<f64> {
        let log_prior_ratio = (grid.prior_density(to)? / grid.prior_density(from)?).ln();
        let delta = self.at_point(grid, to)? - self.at_point(grid, from)?;
        acceptance_probability(log_prior_ratio, delta, beta)
    }

    pub fn cached_len(&self) -> usize {
        self.cache.read().len()
    }
}

impl LogLikelihood for LikelihoodOracle {
    fn log_likelihood(&self, values: &[f64]) -> Result<f64> {
        let key: Vec<u64> = values.iter().map(|v| v.to_bits()).collect();
        if let Some(&v) = self.cache.read().get(&key) {
            return Ok(v);
        }
        let v = self.evaluate(&self.source_params(values)?)?;
        self.cache.write().insert(key, v);
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gwsignal::series::FrequencyGrid;
    use crate::gwsignal::waveform::ToyInspiral;

    #[test]
    fn quadratic_form_arithmetic() {
        let d = [Complex64::new(1.0, 1.0)];
        let h = [Complex64::new(0.0, 0.0)];
        assert_eq!(gaussian_log_likelihood(&d, &h, &[1.0]).unwrap(), -1.0);
        assert_eq!(gaussian_log_likelihood(&d, &d, &[1.0]).unwrap(), 0.0);
        assert_eq!(gaussian_log_likelihood(&d, &h, &[2.0]).unwrap(), -0.5);
        assert!(gaussian_log_likelihood(&d, &h, &[1.0, 1.0]).is_err());
    }

    #[test]
    fn acceptance_cases() {
        assert_eq!(acceptance_probability(0.0, 0.0, 1.0).unwrap(), 1.0);
        assert_eq!(acceptance_probability(0.0, -50.0, 0.0).unwrap(), 1.0);
        assert_eq!(acceptance_probability(0.0, f64::NEG_INFINITY, 0.0).unwrap(), 1.0);
        let a = acceptance_probability(0.0, -2.0, 0.5).unwrap();
        assert!((a - (-1.0f64).exp()).abs() < 1e-15);
        assert!((a - 0.3679).abs() < 1e-4);
        assert_eq!(acceptance_probability(0.0, -1e300, 1e10).unwrap(), (-745.0f64).exp());
        assert_eq!(acceptance_probability(0.0, 1e300, 1e10).unwrap(), 1.0);
        assert!(acceptance_probability(0.0, 1.0, -0.1).is_err());
    }

    #[test]
    fn oracle_peaks_at_zero_noise_truth() {
        let grid = FrequencyGrid::spanning(20.0, 256.0, 0.25).unwrap();
        let truth = SourceParams::new(19.5, 2.0);
        let data = ToyInspiral.strain(&truth, &grid).unwrap();
        let oracle = LikelihoodOracle::new(
            data,
            &PsdModel::default(),
            Box::new(ToyInspiral),
            vec![ParamKind::ChirpMass, ParamKind::MassRatio],
            truth,
        )
        .unwrap();
        assert_eq!(oracle.log_likelihood(&[19.5, 2.0]).unwrap(), 0.0);
        assert!(oracle.log_likelihood(&[19.51, 2.0]).unwrap() < 0.0);
        assert_eq!(oracle.cached_len(), 2);
        let again = oracle.log_likelihood(&[19.51, 2.0]).unwrap();
        assert_eq!(
            again.to_bits(),
            oracle.evaluate(&SourceParams::new(19.51, 2.0)).unwrap().to_bits()
        );
        assert!(oracle.log_likelihood(&[19.5]).is_err());
    }
}
