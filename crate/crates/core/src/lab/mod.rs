//! Scaling sweeps along `ε = σ^{-j}`, quotient fits, the pointwise Hölder
//! probe and run manifests.

mod config;
mod holder;
mod manifest;
mod quotient;
mod sweep;

pub use config::{OutputPaths, SweepConfig, SweepPoint};
pub use holder::{geometric_amplitudes, holder_probe, HolderFit, HolderTarget, HolderVerdict, MapTarget, ScalarModel};
pub use manifest::{config_hash, sha256_hex, Manifest};
pub use quotient::{quotient_blowup_test, QuotientKind, QuotientTest, Trend, SLOPE_TOLERANCE};
pub use sweep::{evaluate_point, read_rows, run_scaling_sweep, sweep_field, SweepOutcome, SweepRecord, SweepRow};
