//! Strang-split integration of `i u_t + Δu = |u|^p u` and its
//! conservation and pseudoconformal diagnostics.

pub mod nonlinearity;
pub mod pcf;
pub mod strang;

pub use nonlinearity::{nonlinear_phase_step, nonlinearity, nonlinearity_difference, power_difference};
pub use pcf::{log_sample_times, pseudoconformal_report, require_decay_fit, ConservationReport, PcfSample};
pub use strang::{evolve, SolverConfig, StrangStepper, Trajectory};
