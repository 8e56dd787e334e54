//! Random tessellations of a periodic pixel grid.

use std::fmt::Debug;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::params::ParamMap;
use crate::patchmodels::SizeDistribution;
use crate::registry::Registry;

use super::Grid;

/// Cell label per pixel (row-major) and the number of cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Tessellation {
    pub labels: Vec<u32>,
    pub cells: usize,
}

impl Tessellation {
    /// Pixel count of every cell.
    pub fn cell_pixels(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.cells];
        for &l in &self.labels {
            counts[l as usize] += 1;
        }
        counts
    }

    /// Area-weighted first and second moments of the equal-area diameter
    /// `2√(A/π)`, in meters and m².
    pub fn diameter_moments(&self, grid: &Grid) -> (f64, f64) {
        let cell_area = grid.pitch * grid.pitch;
        let (mut total, mut first, mut second) = (0.0, 0.0, 0.0);
        for c in self.cell_pixels().into_iter().filter(|&c| c > 0) {
            let a = c as f64 * cell_area;
            let l2 = 4.0 * a / std::f64::consts::PI;
            total += a;
            first += a * l2.sqrt();
            second += a * l2;
        }
        (first / total, second / total)
    }
}

/// A germ at `(x, y)` with power weight `w` (m²); weight 0 gives a Voronoi cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Germ {
    pub x: f64,
    pub y: f64,
    pub w: f64,
}

pub trait LayoutGenerator: Debug + Send + Sync {
    fn name(&self) -> &'static str;

    fn describe(&self) -> String;

    /// Germ density in 1/m² before calibration.
    fn nominal_density(&self, sizes: &SizeDistribution) -> f64;

    fn germs(&self, sizes: &SizeDistribution, grid: &Grid, density: f64, rng: &mut ChaCha8Rng) -> Result<Vec<Germ>>;

    fn tessellate(&self, sizes: &SizeDistribution, grid: &Grid, density: f64, rng: &mut ChaCha8Rng) -> Result<Tessellation> {
        let germs = self.germs(sizes, grid, density, rng)?;
        if germs.is_empty() {
            return Err(Error::invalid("layout", "no germs placed; the map is smaller than one patch"));
        }
        Ok(assign_pixels(&germs, grid))
    }
}

/// Poisson germs, unweighted Voronoi cells.
#[derive(Debug, Clone, Copy, Default)]
pub struct PoissonVoronoi;

/// `E[A²]/E[A]² = 1.2802` for Poisson–Voronoi cells.
const POISSON_VORONOI_AREA_RATIO: f64 = 1.2802;

impl LayoutGenerator for PoissonVoronoi {
    fn name(&self) -> &'static str {
        "poisson_voronoi"
    }

    fn describe(&self) -> String {
        "Voronoi cells of Poisson germs".into()
    }

    fn nominal_density(&self, sizes: &SizeDistribution) -> f64 {
        POISSON_VORONOI_AREA_RATIO / (std::f64::consts::FRAC_PI_4 * sizes.moments().mean_square)
    }

    fn germs(&self, _sizes: &SizeDistribution, grid: &Grid, density: f64, rng: &mut ChaCha8Rng) -> Result<Vec<Germ>> {
        let mean = density * grid.area();
        let count = Poisson::new(mean)
            .map_err(|_| Error::invalid("density", format!("bad germ count mean {mean}")))?
            .sample(rng) as usize;
        let side = grid.extent();
        Ok((0..count)
            .map(|_| Germ { x: rng.gen::<f64>() * side, y: rng.gen::<f64>() * side, w: 0.0 })
            .collect())
    }
}

/// Non-overlapping disks placed by random sequential addition, largest first,
/// with diameters drawn from the number-weighted law `Π(ℓ)/ℓ²`; cells are the
/// power (Laguerre) diagram of the disks.
#[derive(Debug, Clone, Copy)]
pub struct PackedLaguerre {
    /// Disk area fraction at the nominal density.
    pub packing: f64,
    /// Placement attempts per disk before it is allowed to overlap.
    pub attempts: usize,
}

impl Default for PackedLaguerre {
    fn default() -> Self {
        PackedLaguerre {
            packing: 0.45,
            attempts: 400,
        }
    }
}

impl PackedLaguerre {
    pub fn new(packing: f64, attempts: usize) -> Result<Self> {
        if !(packing > 0.0 && packing < 0.547) {
            return Err(Error::invalid("packing", format!("must lie in (0, 0.547), got {packing}")));
        }
        if attempts == 0 {
            return Err(Error::invalid("attempts", "must be at least 1"));
        }
        Ok(PackedLaguerre { packing, attempts })
    }
}

/// Components `(lo, hi, mass)` of Π as a mixture of uniform laws.
fn components(sizes: &SizeDistribution) -> Vec<(f64, f64, f64)> {
    match sizes {
        SizeDistribution::Delta { size } => vec![(*size, *size, 1.0)],
        SizeDistribution::Uniform { min, max } => {
            // Split so the ℓ⁻² reweighting inside each piece stays mild.
            let n = ((max / min).ln() / 0.05).ceil().max(1.0) as usize;
            let ratio = (max / min).powf(1.0 / n as f64);
            (0..n)
                .map(|i| {
                    let lo = min * ratio.powi(i as i32);
                    let hi = if i + 1 == n { *max } else { lo * ratio };
                    (lo, hi, (hi - lo) / (max - min))
                })
                .collect()
        }
        SizeDistribution::Custom(c) => c.cells().iter().filter(|c| c.mass > 0.0).map(|c| (c.lo, c.hi, c.mass)).collect(),
    }
}

/// `E_Π[ℓ⁻²]`.
fn inverse_square_moment(parts: &[(f64, f64, f64)]) -> f64 {
    parts.iter().map(|&(lo, hi, m)| m / (lo * hi)).sum()
}

/// Draws from the number-weighted law `∝ Π(ℓ)/ℓ²`.
fn number_weighted_sampler(parts: Vec<(f64, f64, f64)>) -> impl Fn(&mut ChaCha8Rng) -> f64 {
    let weights: Vec<f64> = parts.iter().map(|&(lo, hi, m)| m / (lo * hi)).collect();
    let total: f64 = weights.iter().sum();
    let mut cdf = Vec::with_capacity(weights.len());
    let mut acc = 0.0;
    for w in &weights {
        acc += w / total;
        cdf.push(acc);
    }
    move |rng: &mut ChaCha8Rng| {
        let u: f64 = rng.gen();
        let i = cdf.partition_point(|&c| c < u).min(parts.len() - 1);
        let (lo, hi, _) = parts[i];
        if hi <= lo {
            return lo;
        }
        // density ∝ ℓ⁻² on [lo, hi]
        let v: f64 = rng.gen();
        1.0 / (1.0 / lo - v * (1.0 / lo - 1.0 / hi))
    }
}

impl LayoutGenerator for PackedLaguerre {
    fn name(&self) -> &'static str {
        "packed_laguerre"
    }

    fn describe(&self) -> String {
        format!(
            "Laguerre cells of a random sequential disk packing (packing fraction {}, {} attempts per disk)",
            self.packing, self.attempts
        )
    }

    fn nominal_density(&self, sizes: &SizeDistribution) -> f64 {
        inverse_square_moment(&components(sizes)) / std::f64::consts::FRAC_PI_4
    }

    fn germs(&self, sizes: &SizeDistribution, grid: &Grid, density: f64, rng: &mut ChaCha8Rng) -> Result<Vec<Germ>> {
        let side = grid.extent();
        let count = (density * grid.area()).round() as usize;
        let draw = number_weighted_sampler(components(sizes));
        let shrink = self.packing.sqrt();
        let mut radii: Vec<f64> = (0..count).map(|_| 0.5 * shrink * draw(rng)).collect();
        radii.sort_by(|a, b| b.total_cmp(a));
        let r_max = radii.first().copied().unwrap_or(0.0);
        if 4.0 * r_max > side {
            return Err(Error::invalid("extent", "map too small for the largest patch"));
        }
        let buckets = ((side / (2.0 * r_max)).floor() as usize).clamp(1, 4096);
        let bucket_side = side / buckets as f64;
        let mut grid_index: Vec<Vec<u32>> = vec![Vec::new(); buckets * buckets];
        let mut placed: Vec<Germ> = Vec::with_capacity(count);
        let bucket_of = |v: f64| ((v / bucket_side) as usize).min(buckets - 1);
        for &r in &radii {
            let mut spot = (0.0, 0.0);
            for _ in 0..self.attempts {
                spot = (rng.gen::<f64>() * side, rng.gen::<f64>() * side);
                let (bx, by) = (bucket_of(spot.0), bucket_of(spot.1));
                let reach = ((2.0 * r_max / bucket_side).ceil() as isize).max(1);
                let mut clear = true;
                'search: for dy in -reach..=reach {
                    for dx in -reach..=reach {
                        let cx = (bx as isize + dx).rem_euclid(buckets as isize) as usize;
                        let cy = (by as isize + dy).rem_euclid(buckets as isize) as usize;
                        for &j in &grid_index[cy * buckets + cx] {
                            let g = placed[j as usize];
                            let (ddx, ddy) = (wrap(spot.0 - g.x, side), wrap(spot.1 - g.y, side));
                            let rr = r + g.w.sqrt();
                            if ddx * ddx + ddy * ddy < rr * rr {
                                clear = false;
                                break 'search;
                            }
                        }
                    }
                }
                if clear {
                    break;
                }
            }
            // After `attempts` failures the last spot is kept and the disk overlaps.
            let idx = placed.len() as u32;
            placed.push(Germ { x: spot.0, y: spot.1, w: r * r });
            grid_index[bucket_of(spot.1) * buckets + bucket_of(spot.0)].push(idx);
        }
        Ok(placed)
    }
}

/// Minimum-image displacement on a torus of side `side`.
pub(crate) fn wrap(d: f64, side: f64) -> f64 {
    d - side * (d / side).round()
}

/// Labels each pixel centre with the germ of least power distance `|x − c|² − w`.
pub fn assign_pixels(germs: &[Germ], grid: &Grid) -> Tessellation {
    use rayon::prelude::*;

    let side = grid.extent();
    let n = grid.n;
    let per_bucket = 2.0;
    let buckets = ((germs.len() as f64 / per_bucket).sqrt().floor() as usize).clamp(1, n);
    let bucket_side = side / buckets as f64;
    let mut index: Vec<Vec<u32>> = vec![Vec::new(); buckets * buckets];
    let bucket_of = |v: f64| ((v.rem_euclid(side) / bucket_side) as usize).min(buckets - 1);
    for (i, g) in germs.iter().enumerate() {
        index[bucket_of(g.y) * buckets + bucket_of(g.x)].push(i as u32);
    }
    let w_max = germs.iter().map(|g| g.w).fold(0.0, f64::max);
    let max_ring = buckets / 2 + 1;

    let labels: Vec<u32> = (0..n * n)
        .into_par_iter()
        .map(|p| {
            let (px, py) = (((p % n) as f64 + 0.5) * grid.pitch, ((p / n) as f64 + 0.5) * grid.pitch);
            let (bx, by) = (bucket_of(px) as isize, bucket_of(py) as isize);
            let mut best = f64::INFINITY;
            let mut label = 0u32;
            for ring in 0..=max_ring as isize {
                if ring >= 1 {
                    let reach = (ring - 1) as f64 * bucket_side;
                    if reach * reach - w_max > best {
                        break;
                    }
                }
                for dy in -ring..=ring {
                    for dx in -ring..=ring {
                        if dx.abs() != ring && dy.abs() != ring {
                            continue;
                        }
                        let cx = (bx + dx).rem_euclid(buckets as isize) as usize;
                        let cy = (by + dy).rem_euclid(buckets as isize) as usize;
                        for &j in &index[cy * buckets + cx] {
                            let g = germs[j as usize];
                            let (ddx, ddy) = (wrap(px - g.x, side), wrap(py - g.y, side));
                            let pd = ddx * ddx + ddy * ddy - g.w;
                            if pd < best || (pd == best && j < label) {
                                best = pd;
                                label = j;
                            }
                        }
                    }
                }
            }
            label
        })
        .collect();
    compact(labels, germs.len())
}

/// Renumbers labels so that every cell is non-empty.
fn compact(labels: Vec<u32>, germs: usize) -> Tessellation {
    let mut map = vec![u32::MAX; germs];
    let mut next = 0u32;
    let labels = labels
        .into_iter()
        .map(|l| {
            let slot = &mut map[l as usize];
            if *slot == u32::MAX {
                *slot = next;
                next += 1;
            }
            *slot
        })
        .collect();
    Tessellation {
        labels,
        cells: next as usize,
    }
}

pub type GeneratorRegistry = Registry<Arc<dyn LayoutGenerator>>;

/// `packed_laguerre` (keys `packing`, `attempts`) and `poisson_voronoi`.
pub fn layout_generators() -> GeneratorRegistry {
    let mut r = Registry::new("layout generator");
    r.register(
        "packed_laguerre",
        "Laguerre cells of a random disk packing with diameters from Π (default)",
        |p: &ParamMap| {
            let d = PackedLaguerre::default();
            Ok(Arc::new(PackedLaguerre::new(
                p.f64("packing")?.unwrap_or(d.packing),
                p.usize("attempts")?.unwrap_or(d.attempts),
            )?) as Arc<dyn LayoutGenerator>)
        },
    )
    .register("poisson_voronoi", "Voronoi cells of Poisson germs", |_| {
        Ok(Arc::new(PoissonVoronoi) as Arc<dyn LayoutGenerator>)
    });
    r
}
