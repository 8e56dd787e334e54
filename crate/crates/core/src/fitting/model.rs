//! Patch observables as functions of `(ℓ_min, ℓ_max)` at unit V_rms, and the
//! interpolation cache used inside the fit loop.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lifshitz::Observable;
use crate::patchmodels::{PatchModel, QuasiLocalSpectrum, SharpCutoffSpectrum, SizeDistribution};
use crate::pressure::{patch_energy_pp, patch_pressure_pp, PlatePairSpectra};
use crate::registry::Registry;

/// A patch model parameterized by grain sizes, built at V_rms = 1 V.
pub trait PatchFamily: fmt::Debug + Send + Sync {
    fn name(&self) -> &'static str;

    fn unit_model(&self, l_min: f64, l_max: f64) -> Result<Arc<dyn PatchModel>>;
}

/// Quasi-local correlations over a uniform diameter law on `[ℓ_min, ℓ_max]`.
#[derive(Debug, Clone, Copy, Default)]
pub struct QuasiLocalUniform;

impl PatchFamily for QuasiLocalUniform {
    fn name(&self) -> &'static str {
        "quasi_local"
    }
    fn unit_model(&self, l_min: f64, l_max: f64) -> Result<Arc<dyn PatchModel>> {
        Ok(Arc::new(QuasiLocalSpectrum::new(SizeDistribution::uniform(l_min, l_max)?, 1.0)?))
    }
}

/// Flat spectrum on `2π/ℓ_max ≤ k ≤ 2π/ℓ_min`.
#[derive(Debug, Clone, Copy, Default)]
pub struct SharpCutoffBand;

impl PatchFamily for SharpCutoffBand {
    fn name(&self) -> &'static str {
        "sharp_cutoff"
    }
    fn unit_model(&self, l_min: f64, l_max: f64) -> Result<Arc<dyn PatchModel>> {
        Ok(Arc::new(SharpCutoffSpectrum::from_grain_sizes(l_min, l_max, 1.0)?))
    }
}

pub type PatchFamilyRegistry = Registry<Arc<dyn PatchFamily>>;

pub fn patch_families() -> PatchFamilyRegistry {
    let mut r = Registry::new("fit model");
    r.register("quasi_local", "quasi-local, uniform diameters on l_min..l_max", |_| {
        Ok(Arc::new(QuasiLocalUniform) as Arc<dyn PatchFamily>)
    })
    .register("sharp_cutoff", "flat spectrum on 2π/l_max..2π/l_min", |_| {
        Ok(Arc::new(SharpCutoffBand) as Arc<dyn PatchFamily>)
    });
    r
}

/// The observable of two identical uncorrelated plates at V_rms = 1 V.
pub fn unit_observable(
    family: &dyn PatchFamily,
    observable: Observable,
    radius: Option<f64>,
    l_min: f64,
    l_max: f64,
    d: f64,
) -> Result<f64> {
    let spectra = PlatePairSpectra::identical(family.unit_model(l_min, l_max)?);
    let r = || radius.ok_or_else(|| Error::invalid("radius", format!("{observable} needs a sphere radius")));
    Ok(match observable {
        Observable::PressurePp => patch_pressure_pp(&spectra, d)?,
        Observable::GradientSp => 2.0 * PI * r()? * patch_pressure_pp(&spectra, d)?,
        Observable::ForceSp => 2.0 * PI * r()? * patch_energy_pp(&spectra, d)?,
    })
}

/// Accuracy target for [`PatchCache`] interpolation.
pub const CACHE_TOLERANCE: f64 = 1e-3;
const CACHE_START: usize = 17;
const CACHE_MAX: usize = 513;

/// Unit-voltage observable tabulated on a log-spaced `(D, ℓ_max)` grid at fixed
/// `ℓ_min`, interpolated bilinearly in `(ln D, ln ℓ_max, ln value)`.
///
/// The grid is refined until interpolation at every cell centre and edge
/// midpoint agrees with direct evaluation to [`CACHE_TOLERANCE`].
#[derive(Debug, Clone)]
pub struct PatchCache {
    pub family: &'static str,
    pub observable: Observable,
    pub radius: Option<f64>,
    pub l_min: f64,
    log_d: Vec<f64>,
    log_l: Vec<f64>,
    log_v: Vec<f64>,
    /// Largest relative interpolation error found during validation.
    pub max_error: f64,
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

impl PatchCache {
    pub fn build(
        family: &dyn PatchFamily,
        observable: Observable,
        radius: Option<f64>,
        l_min: f64,
        d_range: (f64, f64),
        l_max_range: (f64, f64),
    ) -> Result<Self> {
        let (d_lo, d_hi) = (d_range.0 * 0.999, d_range.1 * 1.001);
        let (l_lo, l_hi) = (l_max_range.0.max(l_min * (1.0 + 1e-9)), l_max_range.1);
        if !(d_lo > 0.0 && d_hi > d_lo && l_hi > l_lo) {
            return Err(Error::invalid("cache", "distance and l_max ranges must be positive and non-empty"));
        }
        let direct = |d: f64, l: f64| unit_observable(family, observable, radius, l_min, l, d);
        let (mut nd, mut nl) = (CACHE_START, CACHE_START);
        loop {
            let log_d = log_grid(d_lo, d_hi, nd);
            let log_l = log_grid(l_lo, l_hi, nl);
            let nodes: Vec<(f64, f64)> = log_l.iter().flat_map(|&l| log_d.iter().map(move |&d| (d, l))).collect();
            let log_v = nodes
                .par_iter()
                .map(|&(d, l)| {
                    let v = direct(d.exp(), l.exp())?;
                    if v > 0.0 {
                        Ok(v.ln())
                    } else {
                        Err(Error::invalid("cache", format!("non-positive patch signal {v:e} at D = {:e} m", d.exp())))
                    }
                })
                .collect::<Result<Vec<f64>>>()?;
            let mut cache = PatchCache {
                family: family.name(),
                observable,
                radius,
                l_min,
                log_d,
                log_l,
                log_v,
                max_error: 0.0,
            };
            // Midpoints along D, along ℓ_max, and cell centres.
            let probes: Vec<(f64, f64, u8)> = (0..nl)
                .flat_map(|j| (0..nd).map(move |i| (i, j)))
                .flat_map(|(i, j)| {
                    let c = &cache;
                    let dm = (i + 1 < nd).then(|| 0.5 * (c.log_d[i] + c.log_d[(i + 1).min(nd - 1)]));
                    let lm = (j + 1 < nl).then(|| 0.5 * (c.log_l[j] + c.log_l[(j + 1).min(nl - 1)]));
                    let mut v = Vec::with_capacity(3);
                    if let Some(d) = dm {
                        v.push((d, c.log_l[j], 0u8));
                    }
                    if let Some(l) = lm {
                        v.push((c.log_d[i], l, 1u8));
                    }
                    if let (Some(d), Some(l)) = (dm, lm) {
                        v.push((d, l, 2u8));
                    }
                    v
                })
                .collect();
            let errors = probes
                .par_iter()
                .map(|&(d, l, axis)| {
                    let exact = direct(d.exp(), l.exp())?;
                    let approx = cache.interpolate(d.exp(), l.exp())?;
                    Ok(((approx / exact - 1.0).abs(), axis))
                })
                .collect::<Result<Vec<(f64, u8)>>>()?;
            let worst = |axis: u8| errors.iter().filter(|e| e.1 == axis).map(|e| e.0).fold(0.0, f64::max);
            let (ed, el, ec) = (worst(0), worst(1), worst(2));
            cache.max_error = ed.max(el).max(ec);
            if cache.max_error <= CACHE_TOLERANCE {
                return Ok(cache);
            }
            let refine_d = ed > CACHE_TOLERANCE || (ec > CACHE_TOLERANCE && ed >= el);
            let refine_l = el > CACHE_TOLERANCE || (ec > CACHE_TOLERANCE && el >= ed);
            if (refine_d && nd >= CACHE_MAX) || (refine_l && nl >= CACHE_MAX) {
                return Err(Error::invalid(
                    "cache",
                    format!("interpolation error {:.2e} exceeds {CACHE_TOLERANCE:e} at the largest grid", cache.max_error),
                ));
            }
            if refine_d {
                nd = 2 * nd - 1;
            }
            if refine_l {
                nl = 2 * nl - 1;
            }
        }
    }

    pub fn covers(&self, d: f64, l_max: f64) -> bool {
        let (d, l) = (d.ln(), l_max.ln());
        d >= self.log_d[0] && d <= *self.log_d.last().unwrap() && l >= self.log_l[0] && l <= *self.log_l.last().unwrap()
    }

    pub fn grid_size(&self) -> (usize, usize) {
        (self.log_d.len(), self.log_l.len())
    }

    pub fn interpolate(&self, d: f64, l_max: f64) -> Result<f64> {
        if !self.covers(d, l_max) {
            return Err(Error::invalid(
                "cache",
                format!("(D = {d:e} m, l_max = {l_max:e} m) lies outside the tabulated range"),
            ));
        }
        let locate = |grid: &[f64], x: f64| -> (usize, f64) {
            let step = (grid[grid.len() - 1] - grid[0]) / (grid.len() - 1) as f64;
            let i = (((x - grid[0]) / step).floor() as usize).min(grid.len() - 2);
            (i, ((x - grid[i]) / step).clamp(0.0, 1.0))
        };
        let (i, s) = locate(&self.log_d, d.ln());
        let (j, t) = locate(&self.log_l, l_max.ln());
        let nd = self.log_d.len();
        let v = |i: usize, j: usize| self.log_v[j * nd + i];
        let lv = (1.0 - s) * (1.0 - t) * v(i, j) + s * (1.0 - t) * v(i + 1, j) + (1.0 - s) * t * v(i, j + 1) + s * t * v(i + 1, j + 1);
        Ok(lv.exp())
    }
}
