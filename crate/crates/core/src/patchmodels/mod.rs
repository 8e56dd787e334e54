//! Patch-potential correlation models: the sharp-cutoff annulus spectrum and
//! the quasi-local (same-patch-only) correlation, with the size laws they use.
//!
//! Every model implements [`PatchModel`]; models are built by name through
//! [`PatchModelRegistry`].

pub mod airy;
pub mod distribution;
pub mod quasi_local;
pub mod registry;
pub mod sharp_cutoff;

use std::fmt;
use std::sync::Arc;

use crate::numerics::hankel::RadialFunction;

pub use distribution::{Cell, Moments, SizeDistribution};
pub use quasi_local::QuasiLocalSpectrum;
pub use registry::{PatchModelRegistry, SizeDistributionRegistry};
pub use sharp_cutoff::SharpCutoffSpectrum;

/// An isotropic voltage power spectral density `C[k]` in V²·m².
pub trait Spectrum: Send + Sync + fmt::Debug {
    fn density(&self, k: f64) -> f64;

    /// Wavenumbers where the density or its derivatives jump.
    fn k_breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }

    /// Wavenumber band `(low, high)` carrying the structure of the spectrum.
    fn k_band(&self) -> (f64, f64);
}

/// A single-plate patch model: variance, real-space correlation and spectrum.
pub trait PatchModel: Spectrum {
    /// Registry name.
    fn name(&self) -> &'static str;

    fn v_rms(&self) -> f64;

    /// Two-point correlation `C(r)` in V².
    fn correlation(&self, r: f64) -> f64;

    /// Radius beyond which the correlation is identically zero.
    fn correlation_support(&self) -> Option<f64> {
        None
    }

    fn correlation_breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }

    /// Same model with a different rms voltage.
    fn with_v_rms(&self, v_rms: f64) -> Arc<dyn PatchModel>;

    /// One-line human-readable parameter summary.
    fn describe(&self) -> String;
}

/// The identically-zero spectrum, the default cross-correlation between plates.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroSpectrum;

impl Spectrum for ZeroSpectrum {
    fn density(&self, _k: f64) -> f64 {
        0.0
    }
    fn k_band(&self) -> (f64, f64) {
        (f64::INFINITY, 0.0)
    }
}

/// `C(r)` of a model as a transformable radial profile.
pub fn correlation_function(model: Arc<dyn PatchModel>) -> RadialFunction {
    let (k_lo, _) = model.k_band();
    let support = model.correlation_support();
    let breaks = model.correlation_breakpoints();
    let decay = support.unwrap_or(10.0 / k_lo.max(f64::MIN_POSITIVE));
    let f = RadialFunction::new(move |r| model.correlation(r), decay).with_breakpoints(breaks);
    match support {
        Some(s) => f.with_support(s),
        None => f,
    }
}

/// `C[k]` of a spectrum as a transformable radial profile.
pub fn spectrum_function(spectrum: Arc<dyn Spectrum>) -> RadialFunction {
    let (_, k_hi) = spectrum.k_band();
    let breaks = spectrum.k_breakpoints();
    RadialFunction::new(move |k| spectrum.density(k), k_hi).with_breakpoints(breaks)
}
