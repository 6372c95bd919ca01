use rand::Rng;

use super::config::BetaSchedule;
use crate::error::Result;
use crate::gwsignal::{log_likelihood_on_grid, LogLikelihood};
use crate::lattice::LatticeGrid;
use crate::qwalk::{sample_shots, AcceptanceTable, RegisterLayout, WalkState};

/// Walk parameters shared by every stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkSettings {
    pub walk_steps: usize,
    pub beta: BetaSchedule,
    pub ancilla: usize,
    pub qubit_cap: usize,
}

/// State-register marginals after `0, 1, ..., walk_steps` applications of the
/// walk operator, starting from the uniform superposition over `grid`.
pub fn walk_marginal_trace(
    grid: &LatticeGrid,
    log_likelihood: &[f64],
    settings: &WalkSettings,
) -> Result<Vec<Vec<f64>>> {
    let layout = RegisterLayout::new(grid.qubits(), settings.ancilla)?;
    let mut state = WalkState::init(layout, settings.qubit_cap)?;
    let mut trace = Vec::with_capacity(settings.walk_steps + 1);
    trace.push(state.s_marginal());
    let mut table = None;
    for step in 0..settings.walk_steps {
        if table.is_none() || !settings.beta.is_constant() {
            let beta = settings.beta.at(step, settings.walk_steps);
            table = Some(AcceptanceTable::build(grid, log_likelihood, beta, settings.ancilla)?);
        }
        state.apply_w(table.as_ref().expect("table built above"))?;
        trace.push(state.s_marginal());
    }
    Ok(trace)
}

/// Runs the walk on `grid` and returns the state-register distribution,
/// indexed by flat label. With `shots`, the exact marginal is replaced by
/// empirical frequencies from that many draws.
pub fn quantum_metropolis<R: Rng + ?Sized>(
    grid: &LatticeGrid,
    ll: &dyn LogLikelihood,
    settings: &WalkSettings,
    shots: Option<usize>,
    rng: &mut R,
) -> Result<Vec<f64>> {
    RegisterLayout::new(grid.qubits(), settings.ancilla)?.check_cap(settings.qubit_cap)?;
    let table = log_likelihood_on_grid(ll, grid)?;
    let mut trace = walk_marginal_trace(grid, &table, settings)?;
    let exact = trace.pop().expect("trace holds the initial marginal");
    match shots {
        Some(n) => sample_shots(&exact, n, rng),
        None => Ok(exact),
    }
}
