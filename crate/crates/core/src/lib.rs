//! Numerical laboratory for scattering theory of the defocusing
//! mass-subcritical NLS `i u_t + Δu = |u|^p u`.

pub mod error;
pub mod dynamics;
pub mod exponents;
pub mod fit;
pub mod lab;
pub mod quadrature;
pub mod scattering;
pub mod spectral;

pub use error::{Error, Result};
