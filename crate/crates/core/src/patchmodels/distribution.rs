//! Patch-diameter probability laws Π(ℓ).

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Number of log-spaced cells a custom density is averaged over.
pub const CUSTOM_GRID_CELLS: usize = 1024;

/// First and second raw moments of a size distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    /// Mean diameter ℓ̄ in meters.
    pub mean: f64,
    /// Mean squared diameter in m².
    pub mean_square: f64,
}

impl Moments {
    pub fn rms(&self) -> f64 {
        self.mean_square.sqrt()
    }
}

/// Probability `mass` of one log-spaced cell, spread uniformly over `[lo, hi]`,
/// the interval whose uniform law has the cell's conditional mean and variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub lo: f64,
    pub hi: f64,
    pub mass: f64,
}

/// A user density, held as a mixture of per-cell uniform laws.
#[derive(Clone)]
pub struct CustomDensity {
    density: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    lo: f64,
    hi: f64,
    cells: Vec<Cell>,
}

impl fmt::Debug for CustomDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomDensity")
            .field("lo", &self.lo)
            .field("hi", &self.hi)
            .field("cells", &self.cells.len())
            .finish()
    }
}

impl CustomDensity {
    pub fn density(&self, l: f64) -> f64 {
        if l < self.lo || l > self.hi {
            0.0
        } else {
            (self.density)(l)
        }
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    /// `Σ mass·⟨ℓⁿ⟩_cell`.
    fn raw_moment(&self, n: i32) -> f64 {
        self.cells
            .iter()
            .map(|c| {
                // mean of ℓⁿ under the uniform law on [lo, hi]
                let avg: f64 = (0..=n).map(|j| c.lo.powi(j) * c.hi.powi(n - j)).sum::<f64>() / (n + 1) as f64;
                c.mass * avg
            })
            .sum()
    }
}

#[derive(Debug, Clone)]
pub enum SizeDistribution {
    Uniform { min: f64, max: f64 },
    Delta { size: f64 },
    Custom(CustomDensity),
}

impl SizeDistribution {
    pub fn uniform(min: f64, max: f64) -> Result<Self> {
        if !(min > 0.0 && min <= max && max.is_finite()) {
            return Err(Error::invalid(
                "size distribution",
                format!("uniform law needs 0 < l_min <= l_max, got [{min:e}, {max:e}]"),
            ));
        }
        Ok(SizeDistribution::Uniform { min, max })
    }

    pub fn delta(size: f64) -> Result<Self> {
        if !(size > 0.0 && size.is_finite()) {
            return Err(Error::invalid("size distribution", format!("patch size must be positive, got {size:e}")));
        }
        Ok(SizeDistribution::Delta { size })
    }

    /// A custom density supported on `[lo, hi]`; must integrate to 1 within 1e-9.
    pub fn custom(density: impl Fn(f64) -> f64 + Send + Sync + 'static, lo: f64, hi: f64) -> Result<Self> {
        let cells = log_cells(&density, lo, hi)?;
        let norm: f64 = cells.iter().map(|c| c.mass).sum();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(
                "size distribution",
                format!("custom density integrates to {norm:.12} instead of 1"),
            ));
        }
        if cells.iter().any(|c| c.mass < 0.0 || !c.mass.is_finite()) {
            return Err(Error::invalid("size distribution", "custom density must be finite and non-negative"));
        }
        Ok(SizeDistribution::Custom(CustomDensity {
            density: Arc::new(density),
            lo,
            hi,
            cells,
        }))
    }

    /// Like [`custom`](Self::custom) but rescales the density to unit mass on its support first.
    pub fn custom_normalized(density: impl Fn(f64) -> f64 + Send + Sync + 'static, lo: f64, hi: f64) -> Result<Self> {
        let norm: f64 = log_cells(&density, lo, hi)?.iter().map(|c| c.mass).sum();
        if !(norm > 0.0) {
            return Err(Error::invalid("size distribution", "density has zero mass on its support"));
        }
        Self::custom(move |l| density(l) / norm, lo, hi)
    }

    /// Log-normal law with median `median` and log-standard deviation `sigma`,
    /// truncated at ±8σ and renormalized.
    pub fn log_normal(median: f64, sigma: f64) -> Result<Self> {
        if !(median > 0.0 && sigma > 0.0) {
            return Err(Error::invalid("size distribution", "log-normal needs positive median and sigma"));
        }
        let lo = median * (-8.0 * sigma).exp();
        let hi = median * (8.0 * sigma).exp();
        Self::custom_normalized(
            move |l: f64| {
                let z = (l / median).ln() / sigma;
                (-0.5 * z * z).exp() / (l * sigma * (2.0 * std::f64::consts::PI).sqrt())
            },
            lo,
            hi,
        )
    }

    /// Smallest and largest diameters with non-zero probability.
    pub fn support(&self) -> (f64, f64) {
        match self {
            SizeDistribution::Uniform { min, max } => (*min, *max),
            SizeDistribution::Delta { size } => (*size, *size),
            SizeDistribution::Custom(c) => (c.lo, c.hi),
        }
    }

    pub fn moments(&self) -> Moments {
        match self {
            SizeDistribution::Uniform { min, max } => Moments {
                mean: 0.5 * (max + min),
                mean_square: (max * max + min * min + max * min) / 3.0,
            },
            SizeDistribution::Delta { size } => Moments {
                mean: *size,
                mean_square: size * size,
            },
            SizeDistribution::Custom(c) => Moments {
                mean: c.raw_moment(1),
                mean_square: c.raw_moment(2),
            },
        }
    }

    /// `E[ℓ⁴]`, used by small-wavenumber expansions.
    pub fn fourth_moment(&self) -> f64 {
        match self {
            SizeDistribution::Uniform { min, max } if max > min => (max.powi(5) - min.powi(5)) / (5.0 * (max - min)),
            SizeDistribution::Uniform { min, .. } => min.powi(4),
            SizeDistribution::Delta { size } => size.powi(4),
            SizeDistribution::Custom(c) => c.raw_moment(4),
        }
    }

    /// Probability density at `l`; `None` for the delta law.
    pub fn density(&self, l: f64) -> Option<f64> {
        match self {
            SizeDistribution::Uniform { min, max } => Some(if l >= *min && l <= *max && max > min {
                1.0 / (max - min)
            } else {
                0.0
            }),
            SizeDistribution::Delta { .. } => None,
            SizeDistribution::Custom(c) => Some(c.density(l)),
        }
    }

    /// Same law with every length multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        match self {
            SizeDistribution::Uniform { min, max } => Self::uniform(min * factor, max * factor),
            SizeDistribution::Delta { size } => Self::delta(size * factor),
            SizeDistribution::Custom(c) => {
                let inner = c.density.clone();
                Self::custom_normalized(move |l| inner(l / factor) / factor, c.lo * factor, c.hi * factor)
            }
        }
    }
}

fn log_cells(density: &dyn Fn(f64) -> f64, lo: f64, hi: f64) -> Result<Vec<Cell>> {
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::invalid("size distribution", format!("custom support must satisfy 0 < lo < hi, got [{lo:e}, {hi:e}]")));
    }
    // Three-point Gauss–Legendre in u = ln ℓ on each cell; dℓ = ℓ du.
    const NODES: [(f64, f64); 3] = [(-0.774_596_669_241_483_4, 5.0 / 9.0), (0.0, 8.0 / 9.0), (0.774_596_669_241_483_4, 5.0 / 9.0)];
    let n = CUSTOM_GRID_CELLS;
    let (u0, u1) = (lo.ln(), hi.ln());
    let h = (u1 - u0) / n as f64;
    Ok((0..n)
        .map(|i| {
            let mid = u0 + (i as f64 + 0.5) * h;
            let (mut mass, mut first, mut second) = (0.0, 0.0, 0.0);
            for &(x, w) in &NODES {
                let l = (mid + 0.5 * h * x).exp();
                let p = w * density(l) * l * 0.5 * h;
                mass += p;
                first += p * l;
                second += p * l * l;
            }
            if !(mass > 0.0) {
                let l = mid.exp();
                return Cell { lo: l, hi: l, mass };
            }
            let mean = first / mass;
            let half_width = (3.0 * (second / mass - mean * mean)).max(0.0).sqrt();
            Cell {
                lo: mean - half_width,
                hi: mean + half_width,
                mass,
            }
        })
        .collect())
}
