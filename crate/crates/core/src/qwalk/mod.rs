//! Statevector simulation of the lattice quantum walk.
//!
//! The walk registers are the lattice state `S`, the move direction `D`, the
//! move sign `E`, an acceptance ancilla `A` and the coin `C`. The ancilla is
//! carried in the statevector so the qubit budget is honest, but the
//! acceptance it would hold is folded directly into the coin rotation after
//! quantization to `a` bits.

mod dump;
mod layout;
mod state;
mod table;

pub use dump::{read_statevector, write_statevector};
pub use layout::{RegisterLayout, DEFAULT_QUBIT_CAP};
pub use state::{sample_shots, WalkState};
pub use table::{quantize_acceptance, AcceptanceTable};

pub(crate) use layout::ceil_log2;
