//! Quasi-local correlations: two points are correlated only when they lie on the
//! same patch, and patches are treated statistically as discs of diameter ℓ ~ Π(ℓ).
//!
//! Real space: `C(r) = (2V²/π) ∫_r^∞ Π(ℓ) [acos(r/ℓ) − (r/ℓ)√(1−(r/ℓ)²)] dℓ`.
//! Fourier space, per size: `C_ℓ[k] = (πV²ℓ²/4) [2J₁(kℓ/2)/(kℓ/2)]²`, averaged over Π.

use std::f64::consts::PI;
use std::sync::Arc;

use super::airy::j1_squared_integral;
use super::distribution::{CustomDensity, SizeDistribution};
use super::{PatchModel, Spectrum};
use crate::error::{Error, Result};
use crate::numerics::bessel::jinc;
use crate::numerics::quadrature::Quadrature;

/// Below this relative width a uniform law is evaluated as a point mass at its mean.
const NARROW_UNIFORM: f64 = 1e-7;

#[derive(Debug, Clone)]
pub struct QuasiLocalSpectrum {
    sizes: SizeDistribution,
    v_rms: f64,
}

/// Spectrum of a custom law without the `V²` factor: each cell is a uniform law,
/// contributing `8π·mass·[F(k·hi/2) − F(k·lo/2)] / (k³·(hi − lo))`.
fn cells_spectrum(c: &CustomDensity, k: f64) -> f64 {
    let mut sum = 0.0;
    for cell in c.cells() {
        if cell.mass == 0.0 {
            continue;
        }
        let width = cell.hi - cell.lo;
        if width <= NARROW_UNIFORM * cell.hi {
            sum += cell.mass * disc_spectrum(0.5 * (cell.lo + cell.hi), k);
        } else {
            let df = j1_squared_integral(0.5 * k * cell.hi) - j1_squared_integral(0.5 * k * cell.lo);
            sum += cell.mass * 8.0 * PI * df / (k * k * k * width);
        }
    }
    sum
}

/// Normalized overlap of two discs of diameter ℓ whose centers are `u·ℓ` apart,
/// times π/2: `acos(u) − u√(1−u²)` for `u ∈ [0, 1]`.
pub fn disc_overlap(u: f64) -> f64 {
    if u >= 1.0 {
        0.0
    } else if u <= 0.0 {
        PI / 2.0
    } else {
        u.acos() - u * (1.0 - u * u).sqrt()
    }
}

/// Antiderivative in `u` of `disc_overlap(u)/u²`.
fn overlap_primitive(u: f64) -> f64 {
    let s = (1.0 - u * u).max(0.0).sqrt();
    -u.min(1.0).acos() / u + 2.0 * ((1.0 + s) / u).ln() - s
}

/// Single-size spectrum `(πV²ℓ²/4)·jinc(kℓ/2)²` without the `V²` factor.
pub fn disc_spectrum(l: f64, k: f64) -> f64 {
    let a = jinc(0.5 * k * l);
    PI * l * l / 4.0 * a * a
}

impl QuasiLocalSpectrum {
    pub fn new(sizes: SizeDistribution, v_rms: f64) -> Result<Self> {
        if !(v_rms >= 0.0 && v_rms.is_finite()) {
            return Err(Error::invalid("v_rms", format!("must be non-negative, got {v_rms}")));
        }
        Ok(QuasiLocalSpectrum { sizes, v_rms })
    }

    pub fn sizes(&self) -> &SizeDistribution {
        &self.sizes
    }

    /// `C[0] = (π/4)·E[ℓ²]·V²`.
    pub fn zero_wavenumber(&self) -> f64 {
        PI / 4.0 * self.sizes.moments().mean_square * self.v_rms * self.v_rms
    }

    fn effective_sizes(&self) -> SizeDistribution {
        match self.sizes {
            SizeDistribution::Uniform { min, max } if max - min <= NARROW_UNIFORM * max => SizeDistribution::Delta {
                size: 0.5 * (min + max),
            },
            _ => self.sizes.clone(),
        }
    }

    fn unit_correlation(&self, r: f64) -> f64 {
        match self.effective_sizes() {
            SizeDistribution::Delta { size } => 2.0 / PI * disc_overlap(r / size),
            SizeDistribution::Uniform { min, max } => {
                if r >= max {
                    return 0.0;
                }
                if r <= 0.0 {
                    return 1.0;
                }
                let lower = r.max(min);
                let integral = r * (overlap_primitive(r / lower) - overlap_primitive(r / max));
                2.0 / PI * integral / (max - min)
            }
            SizeDistribution::Custom(c) => {
                let (lo, hi) = self.sizes.support();
                if r >= hi {
                    return 0.0;
                }
                if r <= 0.0 {
                    return 1.0;
                }
                let start = r.max(lo);
                let f = |l: f64| c.density(l) * disc_overlap(r / l);
                Quadrature::new(1e-10)
                    .with_abs_tol(1e-14 / (hi - lo))
                    .integrate(f, start, hi)
                    .map(|e| 2.0 / PI * e.value)
                    .unwrap_or(f64::NAN)
            }
        }
    }

    fn unit_spectrum(&self, k: f64) -> f64 {
        match self.effective_sizes() {
            SizeDistribution::Delta { size } => disc_spectrum(size, k),
            SizeDistribution::Uniform { min, max } => {
                let x_max = 0.5 * k * max;
                if x_max < 1e-3 {
                    // (π/4)(E[ℓ²] − k²E[ℓ⁴]/16) to O(k⁴)
                    return PI / 4.0 * (self.sizes.moments().mean_square - k * k * self.sizes.fourth_moment() / 16.0);
                }
                let delta_f = j1_squared_integral(x_max) - j1_squared_integral(0.5 * k * min);
                8.0 * PI * delta_f / (k * k * k * (max - min))
            }
            SizeDistribution::Custom(c) => {
                let (_, hi) = self.sizes.support();
                if 0.5 * k * hi < 1e-3 {
                    return PI / 4.0 * (self.sizes.moments().mean_square - k * k * self.sizes.fourth_moment() / 16.0);
                }
                cells_spectrum(&c, k)
            }
        }
    }
}

impl Spectrum for QuasiLocalSpectrum {
    fn density(&self, k: f64) -> f64 {
        if k == 0.0 {
            return self.zero_wavenumber();
        }
        self.v_rms * self.v_rms * self.unit_spectrum(k)
    }

    fn k_band(&self) -> (f64, f64) {
        let (lo, hi) = self.sizes.support();
        (2.0 / hi, 2.0 / lo)
    }
}

impl PatchModel for QuasiLocalSpectrum {
    fn name(&self) -> &'static str {
        "quasi_local"
    }

    fn v_rms(&self) -> f64 {
        self.v_rms
    }

    fn correlation(&self, r: f64) -> f64 {
        self.v_rms * self.v_rms * self.unit_correlation(r)
    }

    fn correlation_support(&self) -> Option<f64> {
        Some(self.sizes.support().1)
    }

    fn correlation_breakpoints(&self) -> Vec<f64> {
        let (lo, hi) = self.sizes.support();
        if hi > lo {
            vec![lo]
        } else {
            Vec::new()
        }
    }

    fn with_v_rms(&self, v_rms: f64) -> Arc<dyn PatchModel> {
        Arc::new(QuasiLocalSpectrum {
            sizes: self.sizes.clone(),
            v_rms,
        })
    }

    fn describe(&self) -> String {
        let law = match &self.sizes {
            SizeDistribution::Uniform { min, max } => format!("uniform l_min = {min:.6e} m, l_max = {max:.6e} m"),
            SizeDistribution::Delta { size } => format!("delta l = {size:.6e} m"),
            SizeDistribution::Custom(_) => {
                let (lo, hi) = self.sizes.support();
                format!("custom on [{lo:.6e}, {hi:.6e}] m")
            }
        };
        format!("quasi_local {law}, v_rms = {:.6e} V", self.v_rms)
    }
}
