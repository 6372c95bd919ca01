use serde::{Deserialize, Serialize};

use super::config::SurvivorMode;
use crate::baselines::{argmax, marginal};
use crate::error::{Error, Result};
use crate::lattice::{LatticeGrid, ParameterSpec};
use crate::qwalk::ceil_log2;

/// One renormalization stage: the lattice the walk runs on.
#[derive(Debug, Clone, PartialEq)]
pub struct RenormStage {
    pub grid: LatticeGrid,
}

impl RenormStage {
    pub fn new(grid: LatticeGrid) -> Self {
        Self { grid }
    }

    /// State-register width `s`.
    pub fn s(&self) -> usize {
        self.grid.state_qubits()
    }

    pub fn is_final(&self) -> bool {
        self.s() == self.grid.num_params()
    }
}

/// Lattice states whose probability reaches `alpha` times the maximum.
#[derive(Debug, Clone, PartialEq)]
pub struct SieveResult {
    pub alpha: f64,
    pub max_probability: f64,
    /// Flat labels, ascending.
    pub survivors: Vec<usize>,
}

pub fn sieve(probs: &[f64], alpha: f64) -> Result<SieveResult> {
    if probs.is_empty() {
        return Err(Error::InvalidParameter("sieve over an empty table".into()));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidParameter(format!(
            "alpha must lie in [0, 1], got {alpha}"
        )));
    }
    let max = probs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let threshold = alpha * max;
    let survivors: Vec<usize> = (0..probs.len()).filter(|&i| probs[i] >= threshold).collect();
    assert!(!survivors.is_empty(), "the most probable state always passes the sieve");
    Ok(SieveResult {
        alpha,
        max_probability: max,
        survivors,
    })
}

/// Bookkeeping for one qubit reduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageTrace {
    /// Width before the reduction.
    pub s: usize,
    /// `|S_h(s)|`.
    pub survivors: usize,
    /// `max[P, min(ceil(log2 |S_h|), s - P)]`.
    pub s_raw: usize,
    /// `s_raw` rounded up to a multiple of `P`.
    pub s_rounded: usize,
    /// Width of the next stage.
    pub s_next: usize,
    /// The most probable joint state is still on the reduced lattice.
    pub argmax_retained: bool,
}

/// Raw reductor width `max[P, min(ceil(log2 n), s - P)]`.
pub fn reduced_width(s: usize, params: usize, survivors: usize) -> usize {
    params.max(ceil_log2(survivors).min(s.saturating_sub(params)))
}

/// Shrinks the stage lattice after a sieve. Each parameter keeps
/// `2^(s'/P)` of its values, never fewer than 2 and always at least one qubit
/// fewer than before (unless already at one qubit).
pub fn reduce_qubits(
    stage: &RenormStage,
    sieved: &SieveResult,
    probs: &[f64],
    mode: SurvivorMode,
) -> Result<(RenormStage, StageTrace)> {
    let grid = &stage.grid;
    let params = grid.num_params();
    let s = stage.s();
    if s <= params {
        return Err(Error::InvalidParameter(format!(
            "cannot reduce a stage that already has one qubit per parameter (s = {s})"
        )));
    }
    if probs.len() != grid.len() {
        return Err(Error::LengthMismatch {
            what: "probabilities vs lattice points",
            left: probs.len(),
            right: grid.len(),
        });
    }
    let s_raw = reduced_width(s, params, sieved.survivors.len());
    let s_rounded = s_raw.div_ceil(params) * params;
    let top = argmax(probs);
    let top_point = grid.point(top);
    let marginals: Vec<Vec<f64>> = (0..params).map(|p| marginal(grid, probs, p)).collect();

    let keep: Vec<Vec<usize>> = match mode {
        SurvivorMode::Marginal => (0..params)
            .map(|p| {
                let q = clamp_qubits(s_rounded / params, grid.qubits()[p]);
                select(&marginals[p], &[], 1 << q, top_point.indices()[p])
            })
            .collect(),
        SurvivorMode::Joint => {
            let mut order: Vec<usize> = (0..probs.len()).collect();
            order.sort_by(|&a, &b| probs[b].total_cmp(&probs[a]).then(a.cmp(&b)));
            let leaders = &order[..(1usize << s_raw).min(order.len())];
            (0..params)
                .map(|p| {
                    let mut coords: Vec<usize> = leaders.iter().map(|&l| grid.index_in(l, p)).collect();
                    coords.sort_unstable();
                    coords.dedup();
                    let q = clamp_qubits(ceil_log2(coords.len()), grid.qubits()[p]);
                    select(&marginals[p], &coords, 1 << q, top_point.indices()[p])
                })
                .collect()
        }
    };

    let specs: Vec<ParameterSpec> = grid.params().to_vec();
    let values = keep
        .iter()
        .enumerate()
        .map(|(p, idx)| idx.iter().map(|&k| grid.values(p)[k]).collect())
        .collect();
    let next = LatticeGrid::from_values(&specs, values)?;
    let top_values = grid.values_at(top);
    let argmax_retained = top_values.iter().enumerate().all(|(p, v)| next.values(p).contains(v));
    let trace = StageTrace {
        s,
        survivors: sieved.survivors.len(),
        s_raw,
        s_rounded,
        s_next: next.state_qubits(),
        argmax_retained,
    };
    Ok((RenormStage::new(next), trace))
}

fn clamp_qubits(wanted: usize, current: usize) -> usize {
    wanted.max(1).min(current.saturating_sub(1).max(1))
}

/// Picks `count` indices: first from `preferred` (ranked by marginal), then
/// from the rest (ranked by marginal). `must` is always included. Returned
/// ascending.
fn select(marg: &[f64], preferred: &[usize], count: usize, must: usize) -> Vec<usize> {
    let rank = |v: &mut Vec<usize>| v.sort_by(|&a, &b| marg[b].total_cmp(&marg[a]).then(a.cmp(&b)));
    let mut first: Vec<usize> = preferred.to_vec();
    rank(&mut first);
    let mut rest: Vec<usize> = (0..marg.len()).filter(|k| !preferred.contains(k)).collect();
    rank(&mut rest);
    let mut chosen: Vec<usize> = first.into_iter().chain(rest).take(count).collect();
    if !chosen.contains(&must) {
        chosen.pop();
        chosen.push(must);
    }
    chosen.sort_unstable();
    chosen
}

/// Per-parameter marginal mean and weighted standard deviation on a final
/// (one qubit per parameter) stage.
pub fn summarize(grid: &LatticeGrid, probs: &[f64]) -> Result<Vec<(f64, f64)>> {
    if grid.qubits().iter().any(|&q| q != 1) {
        return Err(Error::InvalidParameter(format!(
            "summary needs one qubit per parameter, got {:?}",
            grid.qubits()
        )));
    }
    if probs.len() != grid.len() {
        return Err(Error::LengthMismatch {
            what: "probabilities vs lattice points",
            left: probs.len(),
            right: grid.len(),
        });
    }
    Ok((0..grid.num_params())
        .map(|p| {
            let m = marginal(grid, probs, p);
            let total: f64 = m.iter().sum();
            let xs = grid.values(p);
            let mean = m.iter().zip(xs).map(|(w, x)| w * x).sum::<f64>() / total;
            let var = m.iter().zip(xs).map(|(w, x)| w * (x - mean).powi(2)).sum::<f64>() / total;
            (mean, var.max(0.0).sqrt())
        })
        .collect())
}

/// Next search interval `[E - lambda V, E + lambda V]`, clipped to the prior and
/// widened to at least `eps_min_frac` of the prior width.
pub fn update_interval(
    prior: &ParameterSpec,
    mean: f64,
    std: f64,
    lambda: f64,
    eps_min_frac: f64,
) -> Result<(f64, f64)> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    let mut lo = prior.lower.max(mean - lambda * std);
    let mut hi = prior.upper.min(mean + lambda * std);
    let eps = eps_min_frac * prior.width();
    if hi - lo < eps {
        lo = mean - 0.5 * eps;
        hi = mean + 0.5 * eps;
        if lo < prior.lower {
            lo = prior.lower;
            hi = lo + eps;
        } else if hi > prior.upper {
            hi = prior.upper;
            lo = hi - eps;
        }
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(name: &str, lo: f64, hi: f64) -> ParameterSpec {
        ParameterSpec::new(name, lo, hi, "").unwrap()
    }

    #[test]
    fn sieve_thresholds() {
        let probs = [0.5, 0.3, 0.15, 0.05];
        assert_eq!(sieve(&probs, 0.0).unwrap().survivors, vec![0, 1, 2, 3]);
        assert_eq!(sieve(&probs, 1.0).unwrap().survivors, vec![0]);
        assert_eq!(sieve(&probs, 0.5).unwrap().survivors, vec![0, 1]);
        assert_eq!(sieve(&[0.25; 4], 1.0).unwrap().survivors.len(), 4);
        assert_eq!(sieve(&[0.4, 0.2, 0.4], 0.5).unwrap().survivors, vec![0, 1, 2]);
        assert!(sieve(&[], 0.5).is_err());
    }

    #[test]
    fn reductor_formula() {
        assert_eq!(reduced_width(12, 2, 9), 4);
        assert_eq!(reduced_width(4, 2, 1), 2);
        assert_eq!(reduced_width(12, 4, 300), 8);
        assert_eq!(reduced_width(12, 2, 4096), 10);
    }

    #[test]
    fn reduce_keeps_top_marginals_in_value_order() {
        let grid = LatticeGrid::uniform(&[spec("x", 0.0, 3.0), spec("y", 0.0, 3.0)], &[2, 2]).unwrap();
        // mass concentrated on x in {1, 2}, y in {3, 0}
        let mut probs = vec![0.01; 16];
        let put = |probs: &mut Vec<f64>, x: usize, y: usize, p: f64| probs[x | (y << 2)] = p;
        put(&mut probs, 1, 3, 0.4);
        put(&mut probs, 2, 0, 0.2);
        let total: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|p| *p /= total);
        let stage = RenormStage::new(grid);
        let sv = sieve(&probs, 0.5).unwrap();
        assert_eq!(sv.survivors.len(), 2);
        let (next, trace) = reduce_qubits(&stage, &sv, &probs, SurvivorMode::Marginal).unwrap();
        assert_eq!(trace.s_raw, 2);
        assert_eq!(trace.s_next, 2);
        assert!(trace.argmax_retained);
        assert_eq!(next.grid.values(0), &[1.0, 2.0]);
        assert_eq!(next.grid.values(1), &[0.0, 3.0]);
        assert!(next.is_final());
        assert!(reduce_qubits(&next, &sv, &probs[..4], SurvivorMode::Marginal).is_err());
    }

    #[test]
    fn reduce_rounds_to_multiple_of_params() {
        let grid = LatticeGrid::uniform(&[spec("x", 0.0, 1.0), spec("y", 0.0, 1.0)], &[4, 4]).unwrap();
        let probs: Vec<f64> = (0..256).map(|i| 1.0 + (i % 7) as f64).collect();
        let total: f64 = probs.iter().sum();
        let probs: Vec<f64> = probs.iter().map(|p| p / total).collect();
        let sv = sieve(&probs, 0.5).unwrap();
        let (next, trace) = reduce_qubits(&RenormStage::new(grid), &sv, &probs, SurvivorMode::Marginal).unwrap();
        assert_eq!(trace.s_raw, 6);
        assert_eq!(trace.s_rounded, 6);
        assert_eq!(next.grid.qubits(), &[3, 3]);

        let grid = LatticeGrid::uniform(&[spec("x", 0.0, 1.0), spec("y", 0.0, 1.0)], &[3, 3]).unwrap();
        let probs = vec![1.0 / 64.0; 64];
        let sv = SieveResult {
            alpha: 1.0,
            max_probability: 1.0 / 64.0,
            survivors: (0..5).collect(),
        };
        let (next, trace) = reduce_qubits(&RenormStage::new(grid), &sv, &probs, SurvivorMode::Marginal).unwrap();
        assert_eq!(trace.s_raw, 3);
        assert_eq!(trace.s_rounded, 4);
        assert_eq!(next.grid.qubits(), &[2, 2]);
    }

    #[test]
    fn joint_mode_covers_leading_states() {
        let grid = LatticeGrid::uniform(&[spec("x", 0.0, 7.0), spec("y", 0.0, 7.0)], &[3, 3]).unwrap();
        let mut probs = vec![0.001; 64];
        probs[5 | (2 << 3)] = 0.5;
        probs[6 | (2 << 3)] = 0.3;
        let total: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|p| *p /= total);
        let sv = sieve(&probs, 0.5).unwrap();
        let (next, trace) = reduce_qubits(&RenormStage::new(grid), &sv, &probs, SurvivorMode::Joint).unwrap();
        assert!(trace.argmax_retained);
        assert!(next.grid.values(0).contains(&5.0) && next.grid.values(0).contains(&6.0));
        assert!(next.grid.values(1).contains(&2.0));
        assert!(trace.s_next < trace.s);
    }

    #[test]
    fn summary_statistics() {
        let g = LatticeGrid::uniform(&[spec("a", 3.0, 5.0)], &[1]).unwrap();
        assert_eq!(summarize(&g, &[1.0, 0.0]).unwrap(), vec![(3.0, 0.0)]);
        let g = LatticeGrid::uniform(&[spec("a", 0.0, 2.0)], &[1]).unwrap();
        assert_eq!(summarize(&g, &[0.5, 0.5]).unwrap(), vec![(1.0, 1.0)]);
        let g = LatticeGrid::uniform(&[spec("a", 10.0, 20.0)], &[1]).unwrap();
        let (m, v) = summarize(&g, &[0.8, 0.2]).unwrap()[0];
        assert!((m - 12.0).abs() < 1e-12 && (v - 4.0).abs() < 1e-12);
        let g = LatticeGrid::uniform(&[spec("a", 0.0, 1.0)], &[2]).unwrap();
        assert!(summarize(&g, &[0.25; 4]).is_err());
    }

    #[test]
    fn interval_updates() {
        let prior = spec("x", 0.0, 10.0);
        assert_eq!(update_interval(&prior, 5.0, 1.0, 2.0, 1e-6).unwrap(), (3.0, 7.0));
        assert_eq!(update_interval(&prior, 0.5, 1.0, 2.0, 1e-6).unwrap(), (0.0, 2.5));
        let (lo, hi) = update_interval(&prior, 4.0, 0.0, 2.0, 1e-6).unwrap();
        assert!((hi - lo - 1e-5).abs() < 1e-12 && lo < 4.0 && hi > 4.0);
        let (lo, hi) = update_interval(&prior, 0.0, 0.0, 2.0, 1e-6).unwrap();
        assert_eq!(lo, 0.0);
        assert!((hi - 1e-5).abs() < 1e-15);
        assert!(update_interval(&prior, 1.0, 1.0, 0.0, 1e-6).is_err());
    }
}
