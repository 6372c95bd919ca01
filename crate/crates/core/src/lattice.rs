//! Periodic hypercube lattice over the inferred parameters.
//!
//! Each parameter `p` is discretized into `2^Q_p` strictly increasing values.
//! Joint lattice points are addressed either as a [`LatticePoint`] (one index
//! per parameter) or as a flat label, which is the basis label of the state
//! register: parameter 0 occupies the lowest `Q_0` bits, parameter 1 the next
//! `Q_1` bits, and so on.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest per-parameter qubit count accepted by the grid builders.
pub const MAX_QUBITS_PER_PARAM: usize = 24;

/// Name and prior bounds of one inferred parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterSpec {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    #[serde(default)]
    pub unit: String,
}

impl ParameterSpec {
    pub fn new(name: impl Into<String>, lower: f64, upper: f64, unit: impl Into<String>) -> Result<Self> {
        let spec = Self {
            name: name.into(),
            lower,
            upper,
            unit: unit.into(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lower.is_finite() && self.upper.is_finite()) || self.lower >= self.upper {
            return Err(Error::InvalidParameter(format!(
                "{}: bounds must satisfy lower < upper (got [{}, {}])",
                self.name, self.lower, self.upper
            )));
        }
        Ok(())
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    /// Same parameter restricted to `[lower, upper]`.
    pub fn with_bounds(&self, lower: f64, upper: f64) -> Result<Self> {
        Self::new(self.name.clone(), lower, upper, self.unit.clone())
    }

    /// Uniform prior density on `[lower, upper]`.
    pub fn density(&self) -> f64 {
        1.0 / self.width()
    }
}

/// Move along one lattice axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Shift {
    Up,
    Down,
}

impl Shift {
    pub fn from_sign(sign: i32) -> Result<Self> {
        match sign {
            1 => Ok(Shift::Up),
            -1 => Ok(Shift::Down),
            _ => Err(Error::InvalidParameter(format!(
                "shift sign must be +1 or -1, got {sign}"
            ))),
        }
    }

    pub fn reversed(self) -> Self {
        match self {
            Shift::Up => Shift::Down,
            Shift::Down => Shift::Up,
        }
    }

    /// Encoding used by the shift-sign qubit: `|0>` is `+`, `|1>` is `-`.
    pub fn bit(self) -> usize {
        match self {
            Shift::Up => 0,
            Shift::Down => 1,
        }
    }

    pub fn from_bit(bit: usize) -> Self {
        if bit & 1 == 0 {
            Shift::Up
        } else {
            Shift::Down
        }
    }
}

/// One index per parameter.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticePoint(pub Vec<usize>);

impl LatticePoint {
    pub fn indices(&self) -> &[usize] {
        &self.0
    }
}

/// Discretized parameter hypercube with periodic neighbor arithmetic.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeGrid {
    params: Vec<ParameterSpec>,
    qubits: Vec<usize>,
    values: Vec<Vec<f64>>,
    offsets: Vec<usize>,
}

impl LatticeGrid {
    /// Endpoint-inclusive uniform grid: `2^Q_p` values per parameter with
    /// step `(upper - lower) / (2^Q_p - 1)`.
    pub fn uniform(specs: &[ParameterSpec], qubits: &[usize]) -> Result<Self> {
        check_shape(specs, qubits)?;
        let values = specs
            .iter()
            .zip(qubits)
            .map(|(spec, &q)| {
                let n = 1usize << q;
                let step = spec.width() / (n - 1) as f64;
                (0..n)
                    .map(|k| {
                        if k == n - 1 {
                            spec.upper
                        } else {
                            spec.lower + k as f64 * step
                        }
                    })
                    .collect()
            })
            .collect();
        Self::assemble(specs.to_vec(), qubits.to_vec(), values)
    }

    /// Values drawn uniformly from each prior range and sorted.
    pub fn random<R: Rng + ?Sized>(specs: &[ParameterSpec], qubits: &[usize], rng: &mut R) -> Result<Self> {
        check_shape(specs, qubits)?;
        let values = specs
            .iter()
            .zip(qubits)
            .map(|(spec, &q)| {
                let n = 1usize << q;
                loop {
                    let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(spec.lower..=spec.upper)).collect();
                    v.sort_by(f64::total_cmp);
                    if v.windows(2).all(|w| w[0] < w[1]) {
                        break v;
                    }
                }
            })
            .collect();
        Self::assemble(specs.to_vec(), qubits.to_vec(), values)
    }

    /// Grid over explicit per-parameter value lists. Each list must have a
    /// power-of-two length of at least 2 and be strictly increasing.
    pub fn from_values(specs: &[ParameterSpec], values: Vec<Vec<f64>>) -> Result<Self> {
        if specs.len() != values.len() {
            return Err(Error::LengthMismatch {
                what: "parameter specs vs value lists",
                left: specs.len(),
                right: values.len(),
            });
        }
        let mut qubits = Vec::with_capacity(values.len());
        for (spec, v) in specs.iter().zip(&values) {
            if v.len() < 2 || !v.len().is_power_of_two() {
                return Err(Error::InvalidParameter(format!(
                    "{}: value count {} is not a power of two >= 2",
                    spec.name,
                    v.len()
                )));
            }
            qubits.push(v.len().trailing_zeros() as usize);
        }
        check_shape(specs, &qubits)?;
        Self::assemble(specs.to_vec(), qubits, values)
    }

    fn assemble(params: Vec<ParameterSpec>, qubits: Vec<usize>, values: Vec<Vec<f64>>) -> Result<Self> {
        for (spec, v) in params.iter().zip(&values) {
            if !v.windows(2).all(|w| w[0] < w[1]) {
                return Err(Error::InvalidParameter(format!(
                    "{}: values must be strictly increasing",
                    spec.name
                )));
            }
        }
        let offsets = qubits
            .iter()
            .scan(0usize, |acc, &q| {
                let off = *acc;
                *acc += q;
                Some(off)
            })
            .collect();
        Ok(Self {
            params,
            qubits,
            values,
            offsets,
        })
    }

    pub fn params(&self) -> &[ParameterSpec] {
        &self.params
    }

    pub fn num_params(&self) -> usize {
        self.params.len()
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    /// Total state-register width `s = sum_p Q_p`.
    pub fn state_qubits(&self) -> usize {
        self.qubits.iter().sum()
    }

    /// Number of joint lattice points, `2^s`.
    pub fn len(&self) -> usize {
        1usize << self.state_qubits()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points_per_param(&self, p: usize) -> usize {
        1usize << self.qubits[p]
    }

    pub fn values(&self, p: usize) -> &[f64] {
        &self.values[p]
    }

    pub fn all_values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn value(&self, p: usize, k: usize) -> Result<f64> {
        let vals = self
            .values
            .get(p)
            .ok_or_else(|| Error::OutOfRange(format!("parameter {p} of {}", self.params.len())))?;
        vals.get(k)
            .copied()
            .ok_or_else(|| Error::OutOfRange(format!("index {k} for parameter {p} with {} values", vals.len())))
    }

    /// Bit offset of parameter `p` inside the flat label.
    pub fn offset(&self, p: usize) -> usize {
        self.offsets[p]
    }

    pub fn index_in(&self, flat: usize, p: usize) -> usize {
        (flat >> self.offsets[p]) & ((1usize << self.qubits[p]) - 1)
    }

    pub fn point(&self, flat: usize) -> LatticePoint {
        LatticePoint((0..self.num_params()).map(|p| self.index_in(flat, p)).collect())
    }

    pub fn flat(&self, point: &LatticePoint) -> Result<usize> {
        self.check_point(point)?;
        Ok(point
            .0
            .iter()
            .zip(&self.offsets)
            .fold(0usize, |acc, (&k, &off)| acc | (k << off)))
    }

    pub fn check_point(&self, point: &LatticePoint) -> Result<()> {
        if point.0.len() != self.num_params() {
            return Err(Error::LengthMismatch {
                what: "lattice point vs parameters",
                left: point.0.len(),
                right: self.num_params(),
            });
        }
        for (p, &k) in point.0.iter().enumerate() {
            if k >= self.points_per_param(p) {
                return Err(Error::OutOfRange(format!("index {k} for parameter {p}")));
            }
        }
        Ok(())
    }

    /// Parameter values at a flat label, in parameter order.
    pub fn values_at(&self, flat: usize) -> Vec<f64> {
        (0..self.num_params())
            .map(|p| self.values[p][self.index_in(flat, p)])
            .collect()
    }

    pub fn point_values(&self, point: &LatticePoint) -> Result<Vec<f64>> {
        self.check_point(point)?;
        Ok(point.0.iter().enumerate().map(|(p, &k)| self.values[p][k]).collect())
    }

    /// Periodic single-coordinate move.
    pub fn neighbor(&self, point: &LatticePoint, p: usize, shift: Shift) -> Result<LatticePoint> {
        self.check_point(point)?;
        if p >= self.num_params() {
            return Err(Error::OutOfRange(format!("parameter {p} of {}", self.num_params())));
        }
        let mut out = point.clone();
        out.0[p] = wrap(point.0[p], self.points_per_param(p), shift);
        Ok(out)
    }

    /// [`neighbor`](Self::neighbor) on flat labels, without validation.
    pub fn neighbor_flat(&self, flat: usize, p: usize, shift: Shift) -> usize {
        let off = self.offsets[p];
        let n = self.points_per_param(p);
        let mask = (n - 1) << off;
        let k = (flat & mask) >> off;
        (flat & !mask) | (wrap(k, n, shift) << off)
    }

    /// Product of the per-parameter uniform prior densities. The prior is
    /// uniform, so the value does not depend on the point.
    pub fn prior_density(&self, point: &LatticePoint) -> Result<f64> {
        self.check_point(point)?;
        Ok(self.params.iter().map(ParameterSpec::density).product())
    }
}

fn wrap(k: usize, n: usize, shift: Shift) -> usize {
    match shift {
        Shift::Up => (k + 1) % n,
        Shift::Down => (k + n - 1) % n,
    }
}

fn check_shape(specs: &[ParameterSpec], qubits: &[usize]) -> Result<()> {
    if specs.is_empty() {
        return Err(Error::InvalidParameter("at least one parameter is required".into()));
    }
    if specs.len() != qubits.len() {
        return Err(Error::LengthMismatch {
            what: "parameter specs vs qubit counts",
            left: specs.len(),
            right: qubits.len(),
        });
    }
    for (i, spec) in specs.iter().enumerate() {
        spec.validate()?;
        if specs[..i].iter().any(|s| s.name == spec.name) {
            return Err(Error::InvalidParameter(format!(
                "duplicate parameter name {}",
                spec.name
            )));
        }
    }
    for (spec, &q) in specs.iter().zip(qubits) {
        if !(1..=MAX_QUBITS_PER_PARAM).contains(&q) {
            return Err(Error::InvalidParameter(format!(
                "{}: qubit count must be in 1..={MAX_QUBITS_PER_PARAM}, got {q}",
                spec.name
            )));
        }
    }
    Ok(())
}
