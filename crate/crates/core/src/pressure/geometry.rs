use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};

/// Ratios below this many patch areas per interaction area raise a warning.
pub const VALIDITY_THRESHOLD: f64 = 10.0;

/// Sphere of radius `radius` at closest distance `distance` from a plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpherePlaneGeometry {
    pub radius: f64,
    pub distance: f64,
}

impl SpherePlaneGeometry {
    pub fn new(radius: f64, distance: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::invalid("radius", format!("must be positive, got {radius:e} m")));
        }
        if !(distance > 0.0 && distance.is_finite()) {
            return Err(Error::invalid("distance", format!("must be positive, got {distance:e} m")));
        }
        Ok(SpherePlaneGeometry { radius, distance })
    }

    pub fn at(&self, distance: f64) -> Result<Self> {
        Self::new(self.radius, distance)
    }

    /// True when `D/R > 0.01`, outside the proximity-force regime.
    pub fn beyond_pfa(&self) -> bool {
        self.distance / self.radius > 0.01
    }

    /// Effective interaction area `πRD`.
    pub fn interaction_area(&self) -> f64 {
        PI * self.radius * self.distance
    }
}

/// Force gradient `2πR·P` in N/m from a plane–plane pressure.
pub fn pfa_gradient(geometry: &SpherePlaneGeometry, pressure: f64) -> f64 {
    2.0 * PI * geometry.radius * pressure
}

/// Force `2πR·E` in N from a plane–plane energy per area.
pub fn pfa_force(geometry: &SpherePlaneGeometry, energy: f64) -> f64 {
    2.0 * PI * geometry.radius * energy
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidityReport {
    /// `πRD` in m².
    pub interaction_area: f64,
    /// `(π/4)·mean_ℓ²` in m².
    pub patch_area: f64,
    pub ratio: f64,
    pub warning: bool,
}

impl fmt::Display for ValidityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "interaction_area_um2 = {:.6}", self.interaction_area * 1e12)?;
        writeln!(f, "patch_area_um2 = {:.6}", self.patch_area * 1e12)?;
        writeln!(f, "ratio = {:.6}", self.ratio)?;
        if self.warning {
            writeln!(
                f,
                "WARNING: fewer than {VALIDITY_THRESHOLD} patch areas inside the interaction area; ergodic averaging is doubtful"
            )?;
        } else {
            writeln!(f, "status = ok")?;
        }
        Ok(())
    }
}

/// Number of mean patch areas inside the interaction area.
pub fn validity_ratio(geometry: &SpherePlaneGeometry, mean_square_size: f64) -> ValidityReport {
    let interaction_area = geometry.interaction_area();
    let patch_area = PI / 4.0 * mean_square_size;
    let ratio = if patch_area > 0.0 { interaction_area / patch_area } else { f64::INFINITY };
    ValidityReport {
        interaction_area,
        patch_area,
        ratio,
        warning: ratio < VALIDITY_THRESHOLD,
    }
}
