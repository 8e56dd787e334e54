//! Annulus spectrum: flat between `k_min` and `k_max`, zero elsewhere.

use std::f64::consts::PI;
use std::sync::Arc;

use super::{PatchModel, Spectrum};
use crate::error::{Error, Result};
use crate::numerics::bessel::jinc;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SharpCutoffSpectrum {
    k_min: f64,
    k_max: f64,
    v_rms: f64,
}

impl SharpCutoffSpectrum {
    pub fn new(k_min: f64, k_max: f64, v_rms: f64) -> Result<Self> {
        if !(k_min >= 0.0 && k_max > k_min && k_max.is_finite()) {
            return Err(Error::invalid(
                "sharp-cutoff band",
                format!("need 0 <= k_min < k_max, got [{k_min:e}, {k_max:e}]"),
            ));
        }
        if !(v_rms >= 0.0 && v_rms.is_finite()) {
            return Err(Error::invalid("v_rms", format!("must be non-negative, got {v_rms}")));
        }
        Ok(SharpCutoffSpectrum { k_min, k_max, v_rms })
    }

    /// Cutoffs from grain sizes: `k_min = 2π/ℓ_max`, `k_max = 2π/ℓ_min`.
    pub fn from_grain_sizes(l_min: f64, l_max: f64, v_rms: f64) -> Result<Self> {
        if !(l_min > 0.0 && l_max > l_min) {
            return Err(Error::invalid("grain sizes", "need 0 < l_min < l_max"));
        }
        Self::new(2.0 * PI / l_max, 2.0 * PI / l_min, v_rms)
    }

    pub fn k_min(&self) -> f64 {
        self.k_min
    }

    pub fn k_max(&self) -> f64 {
        self.k_max
    }
}

impl Spectrum for SharpCutoffSpectrum {
    fn density(&self, k: f64) -> f64 {
        if k >= self.k_min && k <= self.k_max {
            4.0 * PI * self.v_rms * self.v_rms / (self.k_max * self.k_max - self.k_min * self.k_min)
        } else {
            0.0
        }
    }

    fn k_breakpoints(&self) -> Vec<f64> {
        vec![self.k_min, self.k_max]
    }

    fn k_band(&self) -> (f64, f64) {
        (self.k_min, self.k_max)
    }
}

impl PatchModel for SharpCutoffSpectrum {
    fn name(&self) -> &'static str {
        "sharp_cutoff"
    }

    fn v_rms(&self) -> f64 {
        self.v_rms
    }

    /// `2V²[k_max J₁(k_max r) − k_min J₁(k_min r)] / [(k_max² − k_min²) r]`,
    /// written through `jinc` so that `r = 0` gives `V²` without cancellation.
    fn correlation(&self, r: f64) -> f64 {
        let (a, b) = (self.k_min, self.k_max);
        self.v_rms * self.v_rms * (b * b * jinc(b * r) - a * a * jinc(a * r)) / (b * b - a * a)
    }

    fn with_v_rms(&self, v_rms: f64) -> Arc<dyn PatchModel> {
        Arc::new(SharpCutoffSpectrum { v_rms, ..*self })
    }

    fn describe(&self) -> String {
        format!(
            "sharp_cutoff k_min = {:.6e} 1/m, k_max = {:.6e} 1/m, v_rms = {:.6e} V",
            self.k_min, self.k_max, self.v_rms
        )
    }
}
