//! Monte Carlo patch layouts: random tessellations with independent cell
//! voltages on a periodic square grid, and ensemble statistics measured on them.

mod generators;
mod stats;

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::patchmodels::SizeDistribution;

pub use generators::{
    assign_pixels, layout_generators, Germ, GeneratorRegistry, LayoutGenerator, PackedLaguerre, PoissonVoronoi,
    Tessellation,
};
pub use stats::{
    empirical_correlation, empirical_correlations, empirical_pressure, empirical_spectrum, empirical_spectra,
    ensemble_pressure, jackknife, lattice_shell, parseval_sum, window_scatter, EnsembleEstimate, MapSpectrum, Shell,
    WindowScatter, MIN_REALIZATIONS,
};

/// Smallest grid side accepted.
pub const MIN_GRID: usize = 64;
/// Largest grid side accepted.
pub const MAX_GRID: usize = 8192;
/// Required map side in units of the largest patch.
pub const MIN_EXTENT_PATCHES: f64 = 20.0;
/// Mean-diameter mismatch above which calibration reports a warning.
pub const CALIBRATION_WARNING: f64 = 0.05;

/// Periodic `n × n` lattice with spacing `pitch` (m).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub n: usize,
    pub pitch: f64,
}

impl Grid {
    pub fn extent(&self) -> f64 {
        self.n as f64 * self.pitch
    }

    pub fn area(&self) -> f64 {
        self.extent().powi(2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VoltageLaw {
    /// Uniform on `[−√3·V, √3·V]`.
    #[default]
    Uniform,
    Gaussian,
}

impl VoltageLaw {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "uniform" => Ok(VoltageLaw::Uniform),
            "gaussian" | "normal" => Ok(VoltageLaw::Gaussian),
            other => Err(Error::invalid("voltage_law", format!("expected uniform or gaussian, got `{other}`"))),
        }
    }

    fn sample(self, v_rms: f64, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            VoltageLaw::Uniform => (2.0 * rng.gen::<f64>() - 1.0) * 3f64.sqrt() * v_rms,
            VoltageLaw::Gaussian => Normal::new(0.0, v_rms).map(|d| d.sample(rng)).unwrap_or(0.0),
        }
    }
}

/// One realization: per-pixel voltages on a periodic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct VoltageMap {
    pub grid: Grid,
    pub seed: u64,
    pub v_rms: f64,
    values: Vec<f64>,
    cells: usize,
}

impl VoltageMap {
    pub fn from_values(grid: Grid, seed: u64, v_rms: f64, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n * grid.n {
            return Err(Error::invalid("map", format!("expected {} values, got {}", grid.n * grid.n, values.len())));
        }
        Ok(VoltageMap {
            grid,
            seed,
            v_rms,
            values,
            cells: 0,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Number of patches; 0 when unknown (maps read from text).
    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn sample_mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// `⟨V²⟩` over pixels (not mean-subtracted).
    pub fn mean_square(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>() / self.values.len() as f64
    }

    /// Same layout with every voltage multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        VoltageMap {
            values: self.values.iter().map(|v| v * factor).collect(),
            v_rms: self.v_rms * factor,
            ..self.clone()
        }
    }

    /// Text dump: `#`-prefixed header (n, pitch_m, seed, v_rms_v), then `n` rows of `n` values.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.values.len() * 20 + 128);
        out.push_str("# patch voltage map\n");
        out.push_str(&format!("# n = {}\n# pitch_m = {:e}\n# seed = {}\n# v_rms_v = {:e}\n", self.grid.n, self.grid.pitch, self.seed, self.v_rms));
        for row in self.values.chunks(self.grid.n) {
            let line: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let (mut n, mut pitch, mut seed, mut v_rms) = (None, None, 0u64, 0.0);
        let mut values = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let parse_err = |reason: String| Error::Parse { line: i + 1, reason };
            let line = line.trim();
            if let Some(h) = line.strip_prefix('#') {
                if let Some((k, v)) = h.split_once('=') {
                    let v = v.trim();
                    let bad = || parse_err(format!("bad header value `{v}`"));
                    match k.trim() {
                        "n" => n = Some(v.parse::<usize>().map_err(|_| bad())?),
                        "pitch_m" => pitch = Some(v.parse::<f64>().map_err(|_| bad())?),
                        "seed" => seed = v.parse().map_err(|_| bad())?,
                        "v_rms_v" => v_rms = v.parse().map_err(|_| bad())?,
                        _ => {}
                    }
                }
                continue;
            }
            for tok in line.split_whitespace() {
                values.push(tok.parse::<f64>().map_err(|_| parse_err(format!("`{tok}` is not a number")))?);
            }
        }
        let n = n.ok_or_else(|| Error::Parse { line: 0, reason: "missing `# n = ` header".into() })?;
        let pitch = pitch.ok_or_else(|| Error::Parse { line: 0, reason: "missing `# pitch_m = ` header".into() })?;
        Self::from_values(Grid { n, pitch }, seed, v_rms, values)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}

/// Target versus achieved area-weighted diameter moments of the tessellation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationReport {
    pub density: f64,
    pub target_mean: f64,
    pub achieved_mean: f64,
    pub target_mean_square: f64,
    pub achieved_mean_square: f64,
    pub warning: bool,
}

impl fmt::Display for CalibrationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "germ_density_per_um2 = {:.6}", self.density * 1e-12)?;
        writeln!(f, "mean_diameter_nm target = {:.4} achieved = {:.4}", self.target_mean * 1e9, self.achieved_mean * 1e9)?;
        writeln!(
            f,
            "rms_diameter_nm target = {:.4} achieved = {:.4}",
            self.target_mean_square.sqrt() * 1e9,
            self.achieved_mean_square.sqrt() * 1e9
        )?;
        if self.warning {
            writeln!(
                f,
                "WARNING: mean cell diameter misses the target by more than {:.0}%; the size law is not attainable with this generator",
                CALIBRATION_WARNING * 100.0
            )?;
        }
        Ok(())
    }
}

/// Seeded generator of voltage maps for one size law and grid.
///
/// The germ density is tuned once, on calibration layouts with fixed seeds,
/// so that the area-weighted mean square cell diameter matches `⟨ℓ²⟩` of Π.
#[derive(Debug, Clone)]
pub struct LayoutSimulator {
    pub sizes: SizeDistribution,
    pub v_rms: f64,
    pub grid: Grid,
    pub law: VoltageLaw,
    generator: Arc<dyn LayoutGenerator>,
    calibration: CalibrationReport,
}

const CALIBRATION_SEEDS: [u64; 4] = [0x5eed_0001, 0x5eed_0002, 0x5eed_0003, 0x5eed_0004];

impl LayoutSimulator {
    /// Checks `extent ≥ 20·ℓ_max`, `pitch ≤ ℓ_min/4` and `n ≥ 64`; the pitch is
    /// reduced so that an integer number of pixels spans `extent`.
    pub fn new(
        sizes: SizeDistribution,
        v_rms: f64,
        extent: f64,
        pitch: f64,
        law: VoltageLaw,
        generator: Arc<dyn LayoutGenerator>,
    ) -> Result<Self> {
        if !(v_rms >= 0.0 && v_rms.is_finite()) {
            return Err(Error::invalid("v_rms", format!("must be non-negative, got {v_rms:e} V")));
        }
        let (l_min, l_max) = sizes.support();
        if !(extent >= MIN_EXTENT_PATCHES * l_max * (1.0 - 1e-12)) {
            return Err(Error::invalid(
                "extent",
                format!("must be at least {MIN_EXTENT_PATCHES}·l_max = {:e} m, got {extent:e} m", MIN_EXTENT_PATCHES * l_max),
            ));
        }
        if !(pitch > 0.0 && pitch <= 0.25 * l_min * (1.0 + 1e-12)) {
            return Err(Error::invalid(
                "pitch",
                format!("must resolve the smallest patch (pitch <= l_min/4 = {:e} m), got {pitch:e} m", 0.25 * l_min),
            ));
        }
        let n = (extent / pitch - 1e-9).ceil() as usize;
        if n < MIN_GRID {
            return Err(Error::invalid("grid", format!("needs at least {MIN_GRID} pixels per side, got {n}")));
        }
        if n > MAX_GRID {
            return Err(Error::invalid(
                "grid",
                format!("{n} pixels per side exceeds {MAX_GRID}; raise the pitch or shrink the extent"),
            ));
        }
        let grid = Grid { n, pitch: extent / n as f64 };
        let calibration = calibrate(generator.as_ref(), &sizes, &grid)?;
        Ok(LayoutSimulator {
            sizes,
            v_rms,
            grid,
            law,
            generator,
            calibration,
        })
    }

    pub fn calibration(&self) -> &CalibrationReport {
        &self.calibration
    }

    pub fn generator(&self) -> &dyn LayoutGenerator {
        self.generator.as_ref()
    }

    pub fn tessellate(&self, seed: u64) -> Result<Tessellation> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.generator.tessellate(&self.sizes, &self.grid, self.calibration.density, &mut rng)
    }

    /// One realization; identical seeds give bit-identical maps.
    pub fn generate(&self, seed: u64) -> Result<VoltageMap> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = self.generator.tessellate(&self.sizes, &self.grid, self.calibration.density, &mut rng)?;
        let volts: Vec<f64> = (0..t.cells).map(|_| self.law.sample(self.v_rms, &mut rng)).collect();
        Ok(VoltageMap {
            grid: self.grid,
            seed,
            v_rms: self.v_rms,
            values: t.labels.iter().map(|&l| volts[l as usize]).collect(),
            cells: t.cells,
        })
    }

    /// Realizations with seeds `base_seed + i`, generated in parallel.
    pub fn ensemble(&self, base_seed: u64, count: usize) -> Result<Vec<VoltageMap>> {
        (0..count as u64)
            .into_par_iter()
            .map(|i| self.generate(base_seed.wrapping_add(i)))
            .collect()
    }
}

fn calibrate(generator: &dyn LayoutGenerator, sizes: &SizeDistribution, grid: &Grid) -> Result<CalibrationReport> {
    let target = sizes.moments();
    let mut density = generator.nominal_density(sizes);
    let measure = |density: f64| -> Result<(f64, f64)> {
        let runs: Vec<(f64, f64)> = CALIBRATION_SEEDS
            .par_iter()
            .map(|&s| {
                let mut rng = ChaCha8Rng::seed_from_u64(s);
                Ok(generator.tessellate(sizes, grid, density, &mut rng)?.diameter_moments(grid))
            })
            .collect::<Result<_>>()?;
        let k = runs.len() as f64;
        Ok((runs.iter().map(|r| r.0).sum::<f64>() / k, runs.iter().map(|r| r.1).sum::<f64>() / k))
    };
    let mut achieved = measure(density)?;
    // Cell areas scale as 1/density.
    for _ in 0..2 {
        density *= achieved.1 / target.mean_square;
        achieved = measure(density)?;
    }
    Ok(CalibrationReport {
        density,
        target_mean: target.mean,
        achieved_mean: achieved.0,
        target_mean_square: target.mean_square,
        achieved_mean_square: achieved.1,
        warning: (achieved.0 / target.mean - 1.0).abs() > CALIBRATION_WARNING,
    })
}

/// One realization with the default generator (`packed_laguerre`) and uniform voltage law.
pub fn generate_layout(sizes: SizeDistribution, v_rms: f64, extent: f64, pitch: f64, seed: u64) -> Result<VoltageMap> {
    LayoutSimulator::new(sizes, v_rms, extent, pitch, VoltageLaw::Uniform, Arc::new(PackedLaguerre::default()))?
        .generate(seed)
}
