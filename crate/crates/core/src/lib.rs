//! Electrostatic patch pressures, Lifshitz Casimir pressures and patch-model fitting
//! for conducting plates in plane–plane and sphere–plane (proximity force) geometry.
//!
//! All quantities are SI internally: meters, volts, pascals, kelvin. Photon
//! energies for permittivities are in eV.

pub mod error;
pub mod fitting;
pub mod layoutsim;
pub mod lifshitz;
pub mod numerics;
pub mod params;
pub mod patchmodels;
pub mod pressure;
pub mod registry;

pub use error::{Error, Result};
pub use params::ParamMap;
