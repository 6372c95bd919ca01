use super::layout::RegisterLayout;
use crate::error::{Error, Result};
use crate::gwsignal::acceptance_probability;
use crate::lattice::{LatticeGrid, Shift};

/// `round(A (2^a - 1)) / (2^a - 1)`.
pub fn quantize_acceptance(value: f64, ancilla: usize) -> f64 {
    let levels = ((1u64 << ancilla.min(52)) - 1) as f64;
    (value * levels).round() / levels
}

/// Acceptance probability for every `(state label, direction, sign)` and the
/// coin rotation angle `arcsin(sqrt(A_quantized))` derived from it.
#[derive(Debug, Clone, PartialEq)]
pub struct AcceptanceTable {
    params: usize,
    labels: usize,
    ancilla: usize,
    raw: Vec<f64>,
    angles: Vec<f64>,
}

impl AcceptanceTable {
    fn slot(&self, label: usize, p: usize, shift: Shift) -> usize {
        (label * self.params + p) * 2 + shift.bit()
    }

    fn from_raw(params: usize, labels: usize, ancilla: usize, raw: Vec<f64>) -> Result<Self> {
        if raw.iter().any(|a| !(0.0..=1.0).contains(a)) {
            return Err(Error::InvalidParameter("acceptance values must lie in [0, 1]".into()));
        }
        let angles = raw
            .iter()
            .map(|&a| quantize_acceptance(a, ancilla).sqrt().asin())
            .collect();
        Ok(Self {
            params,
            labels,
            ancilla,
            raw,
            angles,
        })
    }

    /// Tabulates the Metropolis acceptance on `grid` from per-label
    /// log-likelihoods (indexed by flat label).
    pub fn build(grid: &LatticeGrid, log_likelihood: &[f64], beta: f64, ancilla: usize) -> Result<Self> {
        if log_likelihood.len() != grid.len() {
            return Err(Error::LengthMismatch {
                what: "log-likelihoods vs lattice points",
                left: log_likelihood.len(),
                right: grid.len(),
            });
        }
        if ancilla == 0 {
            return Err(Error::InvalidParameter(
                "ancilla register needs at least one qubit".into(),
            ));
        }
        let params = grid.num_params();
        let mut raw = Vec::with_capacity(grid.len() * params * 2);
        for label in 0..grid.len() {
            let here = grid.point(label);
            let prior_here = grid.prior_density(&here)?;
            for p in 0..params {
                for shift in [Shift::Up, Shift::Down] {
                    let to = grid.neighbor_flat(label, p, shift);
                    let prior_to = grid.prior_density(&grid.point(to))?;
                    let delta = log_likelihood[to] - log_likelihood[label];
                    raw.push(acceptance_probability((prior_to / prior_here).ln(), delta, beta)?);
                }
            }
        }
        Self::from_raw(params, grid.len(), ancilla, raw)
    }

    /// Same acceptance `value` for every move.
    pub fn constant(layout: &RegisterLayout, value: f64) -> Result<Self> {
        let params = layout.num_params();
        let labels = 1usize << layout.state_qubits();
        Self::from_raw(
            params,
            labels,
            layout.ancilla_qubits(),
            vec![value; labels * params * 2],
        )
    }

    /// Arbitrary per-move values, laid out as `[(label * P + p) * 2 + sign_bit]`.
    pub fn from_values(layout: &RegisterLayout, values: Vec<f64>) -> Result<Self> {
        let params = layout.num_params();
        let labels = 1usize << layout.state_qubits();
        if values.len() != labels * params * 2 {
            return Err(Error::LengthMismatch {
                what: "acceptance values vs moves",
                left: values.len(),
                right: labels * params * 2,
            });
        }
        Self::from_raw(params, labels, layout.ancilla_qubits(), values)
    }

    pub fn ancilla(&self) -> usize {
        self.ancilla
    }

    pub fn labels(&self) -> usize {
        self.labels
    }

    pub fn params(&self) -> usize {
        self.params
    }

    pub fn raw(&self, label: usize, p: usize, shift: Shift) -> f64 {
        self.raw[self.slot(label, p, shift)]
    }

    pub fn quantized(&self, label: usize, p: usize, shift: Shift) -> f64 {
        quantize_acceptance(self.raw(label, p, shift), self.ancilla)
    }

    /// Rotation angle for a basis component; directions `>= P` never move.
    #[inline]
    pub fn angle(&self, label: usize, direction: usize, sign_bit: usize) -> f64 {
        if direction >= self.params {
            0.0
        } else {
            self.angles[(label * self.params + direction) * 2 + sign_bit]
        }
    }

    pub(crate) fn check_layout(&self, layout: &RegisterLayout) -> Result<()> {
        if self.params != layout.num_params() || self.labels != 1usize << layout.state_qubits() {
            return Err(Error::LengthMismatch {
                what: "acceptance table labels vs layout state space",
                left: self.labels,
                right: 1usize << layout.state_qubits(),
            });
        }
        Ok(())
    }
}
