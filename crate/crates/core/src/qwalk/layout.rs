use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default upper bound on simulated qubits.
pub const DEFAULT_QUBIT_CAP: usize = 26;

pub(crate) fn ceil_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

/// Qubit allocation for the walk registers.
///
/// Bit order inside a basis label, from least significant:
/// state `S` (`s` bits, parameter 0 lowest), direction `D` (`d` bits),
/// shift sign `E` (1 bit), acceptance ancilla `A` (`a` bits), coin `C` (1 bit).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegisterLayout {
    param_qubits: Vec<usize>,
    param_offsets: Vec<usize>,
    s: usize,
    d: usize,
    a: usize,
}

impl RegisterLayout {
    pub fn new(param_qubits: &[usize], ancilla: usize) -> Result<Self> {
        if param_qubits.is_empty() {
            return Err(Error::InvalidParameter("layout needs at least one parameter".into()));
        }
        if param_qubits.contains(&0) {
            return Err(Error::InvalidParameter(
                "every parameter needs at least one qubit".into(),
            ));
        }
        if ancilla == 0 {
            return Err(Error::InvalidParameter(
                "the acceptance register needs at least one qubit".into(),
            ));
        }
        let mut offsets = Vec::with_capacity(param_qubits.len());
        let mut acc = 0;
        for &q in param_qubits {
            offsets.push(acc);
            acc += q;
        }
        Ok(Self {
            param_qubits: param_qubits.to_vec(),
            param_offsets: offsets,
            s: acc,
            d: ceil_log2(param_qubits.len()),
            a: ancilla,
        })
    }

    /// `P` parameters with `Q` qubits each.
    pub fn uniform(params: usize, qubits: usize, ancilla: usize) -> Result<Self> {
        Self::new(&vec![qubits; params], ancilla)
    }

    pub fn num_params(&self) -> usize {
        self.param_qubits.len()
    }

    pub fn param_qubits(&self) -> &[usize] {
        &self.param_qubits
    }

    pub fn param_offset(&self, p: usize) -> usize {
        self.param_offsets[p]
    }

    pub fn state_qubits(&self) -> usize {
        self.s
    }

    pub fn direction_qubits(&self) -> usize {
        self.d
    }

    pub fn ancilla_qubits(&self) -> usize {
        self.a
    }

    /// `s + d + a + 2`.
    pub fn total_qubits(&self) -> usize {
        self.s + self.d + self.a + 2
    }

    pub fn dimension(&self) -> usize {
        1usize << self.total_qubits()
    }

    pub fn state_mask(&self) -> usize {
        (1usize << self.s) - 1
    }

    pub fn direction_shift(&self) -> usize {
        self.s
    }

    pub fn direction_mask(&self) -> usize {
        ((1usize << self.d) - 1) << self.s
    }

    pub fn sign_bit(&self) -> usize {
        1usize << (self.s + self.d)
    }

    pub fn ancilla_shift(&self) -> usize {
        self.s + self.d + 1
    }

    pub fn coin_bit(&self) -> usize {
        1usize << (self.total_qubits() - 1)
    }

    pub fn direction_of(&self, idx: usize) -> usize {
        (idx & self.direction_mask()) >> self.s
    }

    pub fn check_cap(&self, cap: usize) -> Result<()> {
        let required = self.total_qubits();
        if required > cap || required >= usize::BITS as usize - 1 {
            return Err(Error::QubitCap { required, cap });
        }
        Ok(())
    }
}
