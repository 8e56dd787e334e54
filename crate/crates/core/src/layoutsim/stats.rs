//! Ensemble statistics of voltage maps.
//!
//! Periodogram convention: `P(q) = |a² Σ_x V(x) e^{−iq·x}|² / A` with pixel
//! area `a²` and map area `A`, so that `E[P(q)]` approximates `C[q]` and
//! `Σ_q P(q)/A` is the pixel mean of `V²`.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use super::{Grid, VoltageMap};
use crate::error::{Error, Result};
use crate::numerics::constants::VACUUM_PERMITTIVITY;

/// Fewest maps accepted by the ensemble estimators.
pub const MIN_REALIZATIONS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleEstimate {
    pub value: f64,
    /// Jackknife standard error of `value`.
    pub std_error: f64,
    pub realizations: usize,
}

impl EnsembleEstimate {
    /// `|value − reference|` in units of the standard error.
    pub fn sigmas_from(&self, reference: f64) -> f64 {
        (self.value - reference).abs() / self.std_error
    }
}

/// Delete-one jackknife of `stat` over `samples`: `(stat(all), standard error)`.
pub fn jackknife(samples: &[f64], stat: impl Fn(&[f64]) -> f64) -> (f64, f64) {
    let n = samples.len();
    let full = stat(samples);
    if n < 2 {
        return (full, f64::INFINITY);
    }
    let mut buf = Vec::with_capacity(n - 1);
    let leave_out: Vec<f64> = (0..n)
        .map(|i| {
            buf.clear();
            buf.extend_from_slice(&samples[..i]);
            buf.extend_from_slice(&samples[i + 1..]);
            stat(&buf)
        })
        .collect();
    let mean = leave_out.iter().sum::<f64>() / n as f64;
    let var = leave_out.iter().map(|t| (t - mean).powi(2)).sum::<f64>() * (n - 1) as f64 / n as f64;
    (full, var.sqrt())
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn estimate(per_map: &[f64]) -> EnsembleEstimate {
    let (value, std_error) = jackknife(per_map, mean);
    EnsembleEstimate {
        value,
        std_error,
        realizations: per_map.len(),
    }
}

/// Lattice points whose distance from the origin lies in `[r − s/2, r + s/2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Shell {
    /// Row-major indices into the `n × n` array.
    pub indices: Vec<usize>,
    /// Distance of each point from the origin.
    pub radii: Vec<f64>,
}

impl Shell {
    /// Mean of `f` over the shell's radii.
    pub fn average(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.radii.iter().map(|&r| f(r)).sum::<f64>() / self.radii.len() as f64
    }
}

/// Shell of minimum-image lattice vectors with spacing `s` on an `n × n` torus.
pub fn lattice_shell(n: usize, s: f64, r: f64) -> Shell {
    let (lo, hi) = (r - 0.5 * s, r + 0.5 * s);
    let signed = |i: usize| if i <= n / 2 { i as f64 } else { i as f64 - n as f64 };
    let mut indices = Vec::new();
    let mut radii = Vec::new();
    for j in 0..n {
        for i in 0..n {
            let rad = s * signed(i).hypot(signed(j));
            if rad >= lo.max(0.0) && rad < hi {
                indices.push(j * n + i);
                radii.push(rad);
            }
        }
    }
    Shell { indices, radii }
}

struct Fft2 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Fft2 {
    fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Fft2 {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    /// Unnormalized 2-D transform in place.
    fn run(&self, data: &mut [Complex<f64>], inverse: bool) {
        let plan = if inverse { &self.inverse } else { &self.forward };
        plan.process(data);
        transpose(data, self.n);
        plan.process(data);
        transpose(data, self.n);
    }
}

fn transpose(data: &mut [Complex<f64>], n: usize) {
    for j in 0..n {
        for i in (j + 1)..n {
            data.swap(j * n + i, i * n + j);
        }
    }
}

/// Discrete Fourier coefficients of one map.
#[derive(Debug, Clone)]
pub struct MapSpectrum {
    pub grid: Grid,
    coeffs: Vec<Complex<f64>>,
}

impl MapSpectrum {
    pub fn new(map: &VoltageMap) -> Self {
        let fft = Fft2::new(map.grid.n);
        let mut coeffs: Vec<Complex<f64>> = map.values().iter().map(|&v| Complex::new(v, 0.0)).collect();
        fft.run(&mut coeffs, false);
        MapSpectrum { grid: map.grid, coeffs }
    }

    fn periodogram_scale(&self) -> f64 {
        let n2 = (self.grid.n * self.grid.n) as f64;
        self.grid.pitch * self.grid.pitch / n2
    }

    /// Auto-periodogram at flat index `i`.
    pub fn auto(&self, i: usize) -> f64 {
        self.coeffs[i].norm_sqr() * self.periodogram_scale()
    }

    /// Real part of the cross-periodogram with `other` at flat index `i`.
    pub fn cross(&self, other: &MapSpectrum, i: usize) -> f64 {
        (self.coeffs[i] * other.coeffs[i].conj()).re * self.periodogram_scale()
    }

    /// `|q|` at every flat index.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let n = self.grid.n;
        let dk = 2.0 * PI / self.grid.extent();
        let signed = |i: usize| if i <= n / 2 { i as f64 } else { i as f64 - n as f64 };
        (0..n * n).map(|p| dk * signed(p % n).hypot(signed(p / n))).collect()
    }

    /// Pixel autocorrelation `(1/n²) Σ_x V(x)V(x+Δ)` at every lattice shift.
    pub fn autocorrelation(&self) -> Vec<f64> {
        let n = self.grid.n;
        let mut power: Vec<Complex<f64>> = self.coeffs.iter().map(|c| Complex::new(c.norm_sqr(), 0.0)).collect();
        Fft2::new(n).run(&mut power, true);
        let norm = (n * n) as f64;
        power.iter().map(|c| c.re / (norm * norm)).collect()
    }
}

fn check_ensemble(maps: &[VoltageMap]) -> Result<Grid> {
    if maps.len() < MIN_REALIZATIONS {
        return Err(Error::Realizations {
            have: maps.len(),
            need: MIN_REALIZATIONS,
        });
    }
    let grid = maps[0].grid;
    if maps.iter().any(|m| m.grid != grid) {
        return Err(Error::invalid("maps", "all maps must share one grid"));
    }
    Ok(grid)
}

/// Ensemble correlation `⟨V(x)V(x+r)⟩` at each `r`, radially averaged over
/// [`lattice_shell`]`(n, pitch, r)`.
pub fn empirical_correlations(maps: &[VoltageMap], rs: &[f64]) -> Result<Vec<EnsembleEstimate>> {
    let grid = check_ensemble(maps)?;
    for &r in rs {
        if !(r >= 0.0 && r < grid.extent() / 4.0) {
            return Err(Error::invalid("r", format!("must lie in [0, extent/4 = {:e} m), got {r:e} m", grid.extent() / 4.0)));
        }
    }
    let shells: Vec<Shell> = rs.iter().map(|&r| lattice_shell(grid.n, grid.pitch, r)).collect();
    let per_map: Vec<Vec<f64>> = maps
        .par_iter()
        .map(|m| {
            let ac = MapSpectrum::new(m).autocorrelation();
            shells.iter().map(|s| s.indices.iter().map(|&i| ac[i]).sum::<f64>() / s.indices.len() as f64).collect()
        })
        .collect();
    Ok((0..rs.len())
        .map(|j| estimate(&per_map.iter().map(|v| v[j]).collect::<Vec<_>>()))
        .collect())
}

pub fn empirical_correlation(maps: &[VoltageMap], r: f64) -> Result<EnsembleEstimate> {
    Ok(empirical_correlations(maps, &[r])?[0])
}

/// Ensemble periodogram at each `k`, radially averaged over
/// [`lattice_shell`]`(n, 2π/extent, k)`.
pub fn empirical_spectra(maps: &[VoltageMap], ks: &[f64]) -> Result<Vec<EnsembleEstimate>> {
    let grid = check_ensemble(maps)?;
    let nyquist = PI / grid.pitch;
    for &k in ks {
        if !(k >= 0.0 && k < nyquist) {
            return Err(Error::invalid("k", format!("must lie in [0, π/pitch = {nyquist:e} 1/m), got {k:e}")));
        }
    }
    let dk = 2.0 * PI / grid.extent();
    let shells: Vec<Shell> = ks.iter().map(|&k| lattice_shell(grid.n, dk, k)).collect();
    let per_map: Vec<Vec<f64>> = maps
        .par_iter()
        .map(|m| {
            let s = MapSpectrum::new(m);
            shells.iter().map(|sh| sh.indices.iter().map(|&i| s.auto(i)).sum::<f64>() / sh.indices.len() as f64).collect()
        })
        .collect();
    Ok((0..ks.len())
        .map(|j| estimate(&per_map.iter().map(|v| v[j]).collect::<Vec<_>>()))
        .collect())
}

pub fn empirical_spectrum(maps: &[VoltageMap], k: f64) -> Result<EnsembleEstimate> {
    Ok(empirical_spectra(maps, &[k])?[0])
}

/// `Σ_q P(q) / A`.
pub fn parseval_sum(map: &VoltageMap) -> f64 {
    let s = MapSpectrum::new(map);
    (0..map.grid.n * map.grid.n).map(|i| s.auto(i)).sum::<f64>() / map.grid.area()
}

/// `(q²/sinh²x, q² cosh x/sinh²x)` with `x = qd`.
fn kernels(q: f64, d: f64) -> (f64, f64) {
    let x = q * d;
    if x == 0.0 {
        let inv = 1.0 / (d * d);
        return (inv, inv);
    }
    if x > 350.0 {
        return (0.0, 0.0);
    }
    let s = x.sinh();
    let auto = q * q / (s * s);
    (auto, auto * x.cosh())
}

fn check_pair(a: &Grid, b: &Grid, d: f64) -> Result<()> {
    if a != b {
        return Err(Error::invalid("maps", "both maps must share one grid"));
    }
    if !(d > 2.0 * a.pitch && d.is_finite()) {
        return Err(Error::invalid(
            "distance",
            format!("must exceed 2·pitch = {:e} m to be resolved by the grid, got {d:e} m", 2.0 * a.pitch),
        ));
    }
    Ok(())
}

fn mode_sum(s1: &MapSpectrum, s2: &MapSpectrum, q: &[f64], d: f64) -> f64 {
    let sum: f64 = q
        .iter()
        .enumerate()
        .map(|(i, &qi)| {
            let (auto, cross) = kernels(qi, d);
            if auto == 0.0 {
                return 0.0;
            }
            auto * (s1.auto(i) + s2.auto(i)) - 2.0 * cross * s1.cross(s2, i)
        })
        .sum();
    0.5 * VACUUM_PERMITTIVITY * sum / s1.grid.area()
}

/// Plane–plane patch pressure (Pa, attractive positive) between two maps,
/// the mode-by-mode sum of `(ε₀/2A) Σ_q q²/sinh²(qd)·[P₁₁ + P₂₂ − 2cosh(qd)·Re P₁₂]`.
pub fn empirical_pressure(map1: &VoltageMap, map2: &VoltageMap, d: f64) -> Result<f64> {
    check_pair(&map1.grid, &map2.grid, d)?;
    let (s1, s2) = (MapSpectrum::new(map1), MapSpectrum::new(map2));
    Ok(mode_sum(&s1, &s2, &s1.wavenumbers(), d))
}

/// Ensemble pressure over disjoint pairs `(maps[2i], maps[2i+1])` at each distance.
pub fn ensemble_pressure(maps: &[VoltageMap], distances: &[f64]) -> Result<Vec<EnsembleEstimate>> {
    let grid = check_ensemble(maps)?;
    for &d in distances {
        check_pair(&grid, &grid, d)?;
    }
    let q = MapSpectrum::new(&maps[0]).wavenumbers();
    let per_pair: Vec<Vec<f64>> = maps
        .par_chunks_exact(2)
        .map(|pair| {
            let (s1, s2) = (MapSpectrum::new(&pair[0]), MapSpectrum::new(&pair[1]));
            distances.iter().map(|&d| mode_sum(&s1, &s2, &q, d)).collect()
        })
        .collect();
    Ok((0..distances.len())
        .map(|j| estimate(&per_pair.iter().map(|v| v[j]).collect::<Vec<_>>()))
        .collect())
}

/// Realization-to-realization scatter of the pressure averaged over square windows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowScatter {
    pub window_side: f64,
    /// Window area over the mean patch area `(π/4)⟨ℓ²⟩`.
    pub patch_areas: f64,
    pub windows: usize,
    pub mean: f64,
    pub std_dev: f64,
}

impl WindowScatter {
    pub fn relative_scatter(&self) -> f64 {
        self.std_dev / self.mean.abs()
    }
}

/// Local pressure `p(x) = (ε₀/2)(E_z² − E_self²)` on plate 1, where `E_self` is
/// plate 1's field with plate 2 removed, averaged over `window_pixels`-wide
/// square windows tiling each pair `(maps[2i], maps[2i+1])`. The mean of `p`
/// over a whole map equals [`empirical_pressure`].
pub fn window_scatter(maps: &[VoltageMap], d: f64, window_pixels: usize, mean_square_size: f64) -> Result<WindowScatter> {
    if maps.len() < 2 {
        return Err(Error::Realizations { have: maps.len(), need: 2 });
    }
    let grid = maps[0].grid;
    check_pair(&grid, &grid, d)?;
    if maps.iter().any(|m| m.grid != grid) {
        return Err(Error::invalid("maps", "all maps must share one grid"));
    }
    let n = grid.n;
    if window_pixels == 0 || window_pixels > n {
        return Err(Error::invalid("window", format!("must span 1..={n} pixels, got {window_pixels}")));
    }
    let per_side = n / window_pixels;
    let q = MapSpectrum::new(&maps[0]).wavenumbers();
    let fft = Fft2::new(n);
    let norm = (n * n) as f64;
    let values: Vec<f64> = maps
        .par_chunks_exact(2)
        .flat_map_iter(|pair| {
            let (s1, s2) = (MapSpectrum::new(&pair[0]), MapSpectrum::new(&pair[1]));
            // E − E_self = q[V₁(coth x − 1) − V₂/sinh x],  E + E_self = q[V₁(coth x + 1) − V₂/sinh x]
            let mut diff = vec![Complex::new(0.0, 0.0); n * n];
            let mut sum = vec![Complex::new(0.0, 0.0); n * n];
            for (i, &qi) in q.iter().enumerate() {
                let (v1, v2) = (s1.coeffs[i], s2.coeffs[i]);
                if qi == 0.0 {
                    let e = (v1 - v2) / d;
                    diff[i] = e;
                    sum[i] = e;
                    continue;
                }
                let x = qi * d;
                if x > 350.0 {
                    sum[i] = v1 * (2.0 * qi);
                    continue;
                }
                let coth_m1 = 2.0 / (2.0 * x).exp_m1();
                let csch = 1.0 / x.sinh();
                diff[i] = (v1 * coth_m1 - v2 * csch) * qi;
                sum[i] = (v1 * (coth_m1 + 2.0) - v2 * csch) * qi;
            }
            fft.run(&mut diff, true);
            fft.run(&mut sum, true);
            let local: Vec<f64> = diff
                .iter()
                .zip(&sum)
                .map(|(a, b)| 0.5 * VACUUM_PERMITTIVITY * (a.re / norm) * (b.re / norm))
                .collect();
            let mut out = Vec::with_capacity(per_side * per_side);
            for wy in 0..per_side {
                for wx in 0..per_side {
                    let mut acc = 0.0;
                    for y in wy * window_pixels..(wy + 1) * window_pixels {
                        let row = &local[y * n + wx * window_pixels..y * n + (wx + 1) * window_pixels];
                        acc += row.iter().sum::<f64>();
                    }
                    out.push(acc / (window_pixels * window_pixels) as f64);
                }
            }
            out
        })
        .collect();
    let m = mean(&values);
    let var = values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (values.len().max(2) - 1) as f64;
    let side = window_pixels as f64 * grid.pitch;
    Ok(WindowScatter {
        window_side: side,
        patch_areas: side * side / (PI / 4.0 * mean_square_size),
        windows: values.len(),
        mean: m,
        std_dev: var.sqrt(),
    })
}
