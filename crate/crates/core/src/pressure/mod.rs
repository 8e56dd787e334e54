//! Electrostatic patch pressure and energy between two parallel plates, their
//! asymptotic regimes, and the proximity-force mapping to sphere–plane.
//!
//! Pressure: `P(d) = (ε₀/4π) ∫₀^∞ k³/sinh²(kd) · {C₁₁ + C₂₂ − 2C₁₂ cosh(kd)} dk`.
//! Energy per area: `E(d) = ∫_d^∞ P = (ε₀/4π) ∫₀^∞ k² {(C₁₁ + C₂₂)(coth(kd) − 1) − 2C₁₂/sinh(kd)} dk`.

mod geometry;

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::constants::{VACUUM_PERMITTIVITY, ZETA3};
use crate::numerics::quadrature::Quadrature;
use crate::patchmodels::{Spectrum, ZeroSpectrum};

pub use geometry::{pfa_force, pfa_gradient, validity_ratio, SpherePlaneGeometry, ValidityReport, VALIDITY_THRESHOLD};

/// Upper limit of the auto terms in units of `1/d`.
const AUTO_CUTOFF: f64 = 40.0;
/// The cross term decays only as `e^{−kd}`.
const CROSS_CUTOFF: f64 = 80.0;

/// Spectra of the two plates and their cross-spectrum.
#[derive(Debug, Clone)]
pub struct PlatePairSpectra {
    pub c11: Arc<dyn Spectrum>,
    pub c22: Arc<dyn Spectrum>,
    pub c12: Arc<dyn Spectrum>,
    cross: bool,
}

impl PlatePairSpectra {
    /// Uncorrelated plates.
    pub fn new(c11: Arc<dyn Spectrum>, c22: Arc<dyn Spectrum>) -> Self {
        PlatePairSpectra {
            c11,
            c22,
            c12: Arc::new(ZeroSpectrum),
            cross: false,
        }
    }

    /// Two uncorrelated plates with the same statistics.
    pub fn identical(c: Arc<dyn Spectrum>) -> Self {
        Self::new(c.clone(), c)
    }

    /// Adds a cross-spectrum, checked against `|C₁₂| ≤ √(C₁₁C₂₂)` on a log grid
    /// spanning the bands of all three spectra.
    pub fn with_cross(mut self, c12: Arc<dyn Spectrum>) -> Result<Self> {
        let mut lo = f64::INFINITY;
        let mut hi: f64 = 0.0;
        for s in [&self.c11, &self.c22, &c12] {
            let (a, b) = s.k_band();
            if a.is_finite() && a > 0.0 {
                lo = lo.min(a);
            }
            if b.is_finite() {
                hi = hi.max(b);
            }
        }
        if lo.is_finite() && hi > 0.0 {
            let (lo, hi) = (lo * 1e-2, hi * 1e2);
            let n = 400;
            let mut ks: Vec<f64> = (0..=n).map(|i| lo * (hi / lo).powf(i as f64 / n as f64)).collect();
            ks.push(0.0);
            for s in [&self.c11, &self.c22, &c12] {
                ks.extend(s.k_breakpoints());
            }
            for k in ks {
                let (a, b, c) = (self.c11.density(k), self.c22.density(k), c12.density(k));
                if a < 0.0 || b < 0.0 {
                    return Err(Error::invalid("spectra", format!("negative auto-spectrum at k = {k:e} 1/m")));
                }
                if c.abs() > (a * b).sqrt() * (1.0 + 1e-12) + f64::MIN_POSITIVE {
                    return Err(Error::invalid(
                        "spectra",
                        format!("|C12| = {:e} exceeds sqrt(C11 C22) = {:e} at k = {k:e} 1/m", c.abs(), (a * b).sqrt()),
                    ));
                }
            }
        }
        self.c12 = c12;
        self.cross = true;
        Ok(self)
    }

    pub fn has_cross(&self) -> bool {
        self.cross
    }

    fn lowest_band_edge(&self) -> f64 {
        [&self.c11, &self.c22, &self.c12]
            .iter()
            .map(|s| s.k_band().0)
            .filter(|a| a.is_finite())
            .fold(f64::INFINITY, f64::min)
    }

    /// Geometric break points up to `limit`, plus the spectra's own.
    fn k_points(&self, limit: f64) -> Vec<f64> {
        let mut points = vec![0.0, limit];
        let edge = self.lowest_band_edge();
        let mut k = if edge.is_finite() && edge > 0.0 { edge.min(limit) } else { limit * 1e-6 };
        k = k.min(limit * 1e-3);
        while k < limit {
            points.push(k);
            k *= 2.0;
        }
        for s in [&self.c11, &self.c22, &self.c12] {
            points.extend(s.k_breakpoints().into_iter().filter(|&p| p > 0.0 && p < limit));
        }
        points.sort_by(f64::total_cmp);
        points.dedup();
        points
    }

    fn cutoff(&self, d: f64, factor: f64) -> f64 {
        let edge = self.lowest_band_edge();
        factor / d + if edge.is_finite() { edge } else { 0.0 }
    }

    /// `⟨(V₁ − V₂)²⟩ = (1/2π) ∫ k (C₁₁ + C₂₂ − 2C₁₂) dk`.
    pub fn mean_square_difference(&self) -> Result<f64> {
        use crate::numerics::hankel::{hankel_inverse, RadialFunction};
        let variance = |s: &Arc<dyn Spectrum>| -> Result<f64> {
            let (_, hi) = s.k_band();
            if !hi.is_finite() || hi <= 0.0 {
                return Ok(0.0);
            }
            let spectrum = s.clone();
            let f = RadialFunction::new(move |k| spectrum.density(k), hi).with_breakpoints(s.k_breakpoints());
            hankel_inverse(&f, 0.0)
        };
        let cross = if self.cross { variance(&self.c12)? } else { 0.0 };
        Ok(variance(&self.c11)? + variance(&self.c22)? - 2.0 * cross)
    }
}

fn x_over_sinh(x: f64) -> f64 {
    if x < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x / x.sinh()
    }
}

fn check_distance(d: f64) -> Result<()> {
    if d > 0.0 && d.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("distance", format!("must be positive, got {d:e} m")))
    }
}

fn integrate(
    spectra: &PlatePairSpectra,
    limit: f64,
    d: f64,
    what: &str,
    integrand: impl Fn(f64) -> f64,
) -> Result<f64> {
    let points = spectra.k_points(limit);
    let quad = Quadrature::new(1e-10).with_abs_tol(0.0);
    match quad.integrate_with_breaks(&integrand, &points) {
        Ok(e) => Ok(e.value),
        Err(Error::Quadrature { context, previous, last, error }) => Err(Error::Quadrature {
            context: format!("{what} at d = {d:e} m over k ∈ [0, {limit:e}] 1/m: {context}"),
            previous,
            last,
            error,
        }),
        Err(e) => Err(e),
    }
}

/// Plane–plane patch pressure in Pa; positive is attractive.
pub fn patch_pressure_pp(spectra: &PlatePairSpectra, d: f64) -> Result<f64> {
    check_distance(d)?;
    // k³/sinh²(kd) = (k/d²)·(x/sinh x)²
    let auto = integrate(spectra, spectra.cutoff(d, AUTO_CUTOFF), d, "patch pressure", |k| {
        let s = x_over_sinh(k * d);
        k * s * s * (spectra.c11.density(k) + spectra.c22.density(k))
    })?;
    let cross = if spectra.cross {
        integrate(spectra, spectra.cutoff(d, CROSS_CUTOFF), d, "patch pressure cross term", |k| {
            let x = k * d;
            let s = x_over_sinh(x);
            2.0 * k * s * s * x.cosh() * spectra.c12.density(k)
        })?
    } else {
        0.0
    };
    Ok(VACUUM_PERMITTIVITY / (4.0 * PI * d * d) * (auto - cross))
}

/// Plane–plane patch energy per unit area in J/m², `∫_d^∞ P(d') dd'`.
pub fn patch_energy_pp(spectra: &PlatePairSpectra, d: f64) -> Result<f64> {
    check_distance(d)?;
    // k²(coth x − 1) = (k/d)·2x/(e^{2x} − 1)
    let auto = integrate(spectra, spectra.cutoff(d, AUTO_CUTOFF), d, "patch energy", |k| {
        let x = k * d;
        let bose = if x < 1e-8 { 1.0 - x } else { 2.0 * x / (2.0 * x).exp_m1() };
        k * bose * (spectra.c11.density(k) + spectra.c22.density(k))
    })?;
    let cross = if spectra.cross {
        integrate(spectra, spectra.cutoff(d, CROSS_CUTOFF), d, "patch energy cross term", |k| {
            2.0 * k * x_over_sinh(k * d) * spectra.c12.density(k)
        })?
    } else {
        0.0
    };
    Ok(VACUUM_PERMITTIVITY / (4.0 * PI * d) * (auto - cross))
}

/// Pressures on a distance grid, evaluated in parallel; each entry fails independently.
pub fn pressure_curve(spectra: &PlatePairSpectra, distances: &[f64]) -> Vec<Result<f64>> {
    distances.par_iter().map(|&d| patch_pressure_pp(spectra, d)).collect()
}

/// Energies on a distance grid, evaluated in parallel.
pub fn energy_curve(spectra: &PlatePairSpectra, distances: &[f64]) -> Vec<Result<f64>> {
    distances.par_iter().map(|&d| patch_energy_pp(spectra, d)).collect()
}

/// Patches much larger than the gap: `P = ε₀⟨(V₁ − V₂)²⟩/(2d²)`.
pub fn large_patch_pressure(mean_square_difference: f64, d: f64) -> f64 {
    VACUUM_PERMITTIVITY * mean_square_difference / (2.0 * d * d)
}

/// Energy counterpart of [`large_patch_pressure`]: `ε₀⟨(V₁ − V₂)²⟩/(2d)`.
pub fn large_patch_energy(mean_square_difference: f64, d: f64) -> f64 {
    VACUUM_PERMITTIVITY * mean_square_difference / (2.0 * d)
}

/// Patches much smaller than the gap, uncorrelated plates:
/// `P = (ε₀/4π)(C₁₁[0] + C₂₂[0])·(3ζ(3)/2)/d⁴`.
///
/// For identical quasi-local plates this is `(3ζ(3)/16)·ε₀V²·mean_ℓ²/d⁴`.
pub fn small_patch_pressure(zero_k_sum: f64, d: f64) -> f64 {
    VACUUM_PERMITTIVITY / (4.0 * PI) * zero_k_sum * 1.5 * ZETA3 / d.powi(4)
}

/// Energy counterpart of [`small_patch_pressure`]: `(ε₀/4π)(C₁₁[0] + C₂₂[0])·(ζ(3)/2)/d³`.
pub fn small_patch_energy(zero_k_sum: f64, d: f64) -> f64 {
    VACUUM_PERMITTIVITY / (4.0 * PI) * zero_k_sum * 0.5 * ZETA3 / d.powi(3)
}
