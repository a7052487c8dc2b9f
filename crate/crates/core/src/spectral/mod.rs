//! Periodic grids, the unitary Fourier transform, the exact free flow,
//! norms and functionals on fields, and the two-parameter scaling family.

mod field;
pub mod fourier;
mod grid;
pub mod io;
pub mod norms;
mod profile;
pub mod propagator;
mod scaling;
pub mod spacetime;

pub use field::Field;
pub use fourier::{fourier_transform, Direction};
pub use grid::{Grid, MAX_POINTS_1D, MAX_POINTS_2D};
pub use norms::{
    dispersive_time, energy, gradient_norm_sq, lp_norm, lp_power, mass, moment_norm_sq, sigma_norm,
};
pub use profile::Profile;
pub use propagator::{free_propagate, wrap_check, FreeFlow, WrapCheck};
pub use scaling::scale_family;
pub use spacetime::{
    dispersive_decay_check, dispersive_exponent, spacetime_norm, FieldSampler, FnSampler,
    FreeEvolution, MeshSpec, NormSpec, SpacetimeNorm, TailPolicy,
};
