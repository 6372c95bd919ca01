//! Reference posteriors: exhaustive grid enumeration, a classical lattice
//! Metropolis-Hastings chain, and the comparison statistics used against them.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gwsignal::{acceptance_probability, log_likelihood_on_grid, LogLikelihood};
use crate::lattice::{LatticeGrid, Shift};
use crate::qwalk::quantize_acceptance;

/// Largest lattice [`brute_force_posterior`] will enumerate.
pub const ENUMERATION_CAP: usize = 1 << 20;

/// Normalized tempered posterior over every lattice point.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPosterior {
    pub grid: LatticeGrid,
    /// Indexed by flat label.
    pub probabilities: Vec<f64>,
}

impl GridPosterior {
    pub fn marginal(&self, p: usize) -> Vec<f64> {
        marginal(&self.grid, &self.probabilities, p)
    }

    pub fn argmax(&self) -> usize {
        argmax(&self.probabilities)
    }

    /// Writes `idx_1,...,idx_P,value_1,...,value_P,prob` using the parameter names.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let params = self.grid.params();
        let mut header: Vec<String> = params.iter().map(|s| format!("idx_{}", s.name)).collect();
        header.extend(params.iter().map(|s| s.name.clone()));
        header.push("prob".into());
        w.write_record(&header)?;
        for (label, prob) in self.probabilities.iter().enumerate() {
            let point = self.grid.point(label);
            let mut row: Vec<String> = point.indices().iter().map(|k| k.to_string()).collect();
            row.extend(self.grid.values_at(label).iter().map(|v| v.to_string()));
            row.push(prob.to_string());
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Marginal of parameter `p` from a joint table indexed by flat label.
pub fn marginal(grid: &LatticeGrid, joint: &[f64], p: usize) -> Vec<f64> {
    let mut out = vec![0.0; grid.points_per_param(p)];
    for (label, prob) in joint.iter().enumerate() {
        out[grid.index_in(label, p)] += prob;
    }
    out
}

/// Index of the largest entry; the first one wins ties.
pub fn argmax(values: &[f64]) -> usize {
    values
        .iter()
        .enumerate()
        .fold(
            (0, f64::NEG_INFINITY),
            |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) },
        )
        .0
}

/// `p(x) ∝ exp(beta * logL(x)) * prior(x)` normalized over the lattice.
pub fn posterior_from_log_likelihood(grid: &LatticeGrid, log_likelihood: &[f64], beta: f64) -> Result<GridPosterior> {
    if log_likelihood.len() != grid.len() {
        return Err(Error::LengthMismatch {
            what: "log-likelihoods vs lattice points",
            left: log_likelihood.len(),
            right: grid.len(),
        });
    }
    if !(beta >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "beta must be non-negative, got {beta}"
        )));
    }
    let log_weights = (0..grid.len())
        .map(|label| {
            let prior = grid.prior_density(&grid.point(label))?;
            let tempered = if beta == 0.0 { 0.0 } else { beta * log_likelihood[label] };
            Ok(tempered + prior.ln())
        })
        .collect::<Result<Vec<f64>>>()?;
    let max = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return Err(Error::InvalidParameter("posterior has no finite weight".into()));
    }
    let weights: Vec<f64> = log_weights.iter().map(|w| (w - max).exp()).collect();
    let total: f64 = weights.iter().sum();
    Ok(GridPosterior {
        grid: grid.clone(),
        probabilities: weights.into_iter().map(|w| w / total).collect(),
    })
}

/// Exhaustive tempered posterior on `grid`.
pub fn brute_force_posterior(grid: &LatticeGrid, ll: &dyn LogLikelihood, beta: f64) -> Result<GridPosterior> {
    if grid.len() > ENUMERATION_CAP {
        return Err(Error::EnumerationCap {
            points: grid.len(),
            cap: ENUMERATION_CAP,
        });
    }
    let table = log_likelihood_on_grid(ll, grid)?;
    posterior_from_log_likelihood(grid, &table, beta)
}

/// Visited lattice points (flat labels) of a classical chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSamples {
    pub points: Vec<usize>,
    pub accepted: usize,
    pub seed: u64,
}

impl ChainSamples {
    pub fn acceptance_rate(&self) -> f64 {
        self.accepted as f64 / self.points.len() as f64
    }

    /// Empirical joint distribution over flat labels.
    pub fn histogram(&self, grid: &LatticeGrid) -> Vec<f64> {
        let mut counts = vec![0.0; grid.len()];
        for &x in &self.points {
            counts[x] += 1.0;
        }
        let n = self.points.len() as f64;
        counts.iter_mut().for_each(|c| *c /= n);
        counts
    }

    pub fn marginal(&self, grid: &LatticeGrid, p: usize) -> Vec<f64> {
        marginal(grid, &self.histogram(grid), p)
    }
}

/// Options for [`classical_mh`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainOptions {
    pub beta: f64,
    pub steps: usize,
    pub seed: u64,
    /// Quantize acceptance to this many bits, as the walk's ancilla does.
    pub quantize: Option<usize>,
}

/// Single-site lattice Metropolis-Hastings: pick an axis and a sign uniformly,
/// accept with the tempered Metropolis rule.
pub fn classical_mh(grid: &LatticeGrid, ll: &dyn LogLikelihood, opts: ChainOptions) -> Result<ChainSamples> {
    if opts.steps == 0 {
        return Err(Error::InvalidParameter("chain needs at least one step".into()));
    }
    if grid.len() > ENUMERATION_CAP {
        return Err(Error::EnumerationCap {
            points: grid.len(),
            cap: ENUMERATION_CAP,
        });
    }
    let table = log_likelihood_on_grid(ll, grid)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut current = rng.random_range(0..grid.len());
    let mut points = Vec::with_capacity(opts.steps);
    let mut accepted = 0;
    for _ in 0..opts.steps {
        let p = rng.random_range(0..grid.num_params());
        let shift = if rng.random::<bool>() { Shift::Up } else { Shift::Down };
        let proposal = grid.neighbor_flat(current, p, shift);
        let prior_ratio = grid.prior_density(&grid.point(proposal))? / grid.prior_density(&grid.point(current))?;
        let mut a = acceptance_probability(prior_ratio.ln(), table[proposal] - table[current], opts.beta)?;
        if let Some(bits) = opts.quantize {
            a = quantize_acceptance(a, bits);
        }
        if rng.random::<f64>() < a {
            current = proposal;
            accepted += 1;
        }
        points.push(current);
    }
    Ok(ChainSamples {
        points,
        accepted,
        seed: opts.seed,
    })
}

/// `1/2 sum |p - q|`.
pub fn tv_distance(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch {
            what: "distributions",
            left: p.len(),
            right: q.len(),
        });
    }
    Ok(0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// Quantile of sorted data with linear interpolation between order statistics
/// at position `(n - 1) * prob`.
pub fn quantile_sorted(sorted: &[f64], prob: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * prob;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Equal-tailed interval at the given credibility level.
pub fn credible_interval(samples: &[f64], level: f64) -> Result<(f64, f64)> {
    if samples.is_empty() {
        return Err(Error::InvalidParameter("credible interval of an empty sample".into()));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "level must lie in (0, 1), got {level}"
        )));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let tail = (1.0 - level) / 2.0;
    Ok((quantile_sorted(&sorted, tail), quantile_sorted(&sorted, 1.0 - tail)))
}

/// Equal-tailed interval of a discrete weighted distribution, by inverting
/// its cumulative distribution (no interpolation).
pub fn weighted_credible_interval(values: &[f64], weights: &[f64], level: f64) -> Result<(f64, f64)> {
    if values.is_empty() || values.len() != weights.len() {
        return Err(Error::InvalidParameter(
            "weighted interval needs matching non-empty inputs".into(),
        ));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "level must lie in (0, 1), got {level}"
        )));
    }
    let mut pairs: Vec<(f64, f64)> = values.iter().copied().zip(weights.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = pairs.iter().map(|p| p.1).sum();
    let tail = (1.0 - level) / 2.0;
    let inverse = |target: f64| {
        let mut acc = 0.0;
        for &(v, w) in &pairs {
            acc += w / total;
            if acc >= target - 1e-12 {
                return v;
            }
        }
        pairs[pairs.len() - 1].0
    };
    Ok((inverse(tail), inverse(1.0 - tail)))
}

/// Weighted mean and standard deviation.
pub fn weighted_mean_std(values: &[f64], weights: &[f64]) -> (f64, f64) {
    let total: f64 = weights.iter().sum();
    let mean = values.iter().zip(weights).map(|(v, w)| v * w).sum::<f64>() / total;
    let var = values
        .iter()
        .zip(weights)
        .map(|(v, w)| w * (v - mean).powi(2))
        .sum::<f64>()
        / total;
    (mean, var.max(0.0).sqrt())
}
