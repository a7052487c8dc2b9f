//! Scattering map, wave operator, Born term and the small-data expansion
//! error.

mod born;
mod expansion;
mod kernel;
mod picard;
mod state;

pub use born::{born_term, BornReport, BornSettings};
pub use expansion::{expansion_error, Convergence, ExpansionReport, LowerBoundChain};
pub use kernel::TimeSettings;
pub use picard::{solve_map, MapKind, MapSettings, MapSolution};
pub use state::{scattering_state, ScatteringMeta, ScatteringState, STALL_DOUBLINGS};

use crate::error::Result;
use crate::exponents::PhysParams;
use crate::spectral::Field;

/// `W(ψ)`: solves the final-value problem by Picard iteration, with the
/// solution replaced by its free evolution beyond the last node.
pub fn wave_operator(psi: &Field, params: PhysParams, settings: &MapSettings) -> Result<MapSolution> {
    solve_map(psi, params, MapKind::Wave, settings)
}

/// `S(φ)` by the same Picard scheme; see [`scattering_state`] for the
/// direct time-integration route.
pub fn scattering_map(phi: &Field, params: PhysParams, settings: &MapSettings) -> Result<MapSolution> {
    solve_map(phi, params, MapKind::Scattering, settings)
}
