use std::fmt::Write as _;
use std::sync::Arc;

use patchforce::layoutsim::{
    empirical_correlations, empirical_spectra, ensemble_pressure, lattice_shell, layout_generators, window_scatter,
    EnsembleEstimate, LayoutSimulator, VoltageLaw,
};
use patchforce::patchmodels::{PatchModel, QuasiLocalSpectrum};
use patchforce::pressure::{patch_pressure_pp, PlatePairSpectra};

use super::size_law;
use crate::config::{grid, Quantity, RunConfig};
use crate::error::CliError;
use crate::table::emit;

/// Agreement threshold in standard errors.
const SIGMAS: f64 = 3.0;

fn verdict(e: &EnsembleEstimate, analytic: f64) -> (f64, &'static str) {
    let s = e.sigmas_from(analytic);
    (s, if s <= SIGMAS { "PASS" } else { "FAIL" })
}

/// Ensemble of layouts compared line by line with the quasi-local model.
/// The report holds no timings, so fixed seeds give identical bytes.
pub fn simulate(cfg: &RunConfig) -> Result<(), CliError> {
    let p = &cfg.params;
    let sizes = size_law(p)?;
    let v_rms = p.require_voltage("v_rms")?;
    let (l_min, l_max) = sizes.support();
    let moments = sizes.moments();
    let mean = moments.mean;
    let extent = p.length("extent")?.unwrap_or(20.0 * l_max);
    let pitch = p.length("pitch")?.unwrap_or(l_min / 8.0);
    let realizations = p.usize("realizations")?.unwrap_or(200);
    let seed = p.u64("seed")?.unwrap_or(0);
    let law = VoltageLaw::parse(p.get_str("voltage_law").unwrap_or("uniform"))?;
    let generator_name = p.get_str("generator").unwrap_or("packed_laguerre").to_string();
    let generator = layout_generators().build(&generator_name, p)?;
    let rs = grid(p, "r", Quantity::Length, false, Some(vec![0.0, 0.5 * mean, mean]))?;
    let ks = grid(p, "k", Quantity::Wavenumber, false, Some(vec![0.0]))?;
    let ds = grid(p, "d", Quantity::Length, true, Some(vec![0.3 * mean, mean, 3.0 * mean]))?;
    let window_patches = p.f64("window_patches")?.unwrap_or(48.0);
    let window_distance = p.length("window_distance")?.unwrap_or(ds[0]);
    let dump_dir = p.get_str("dump_maps").map(std::path::PathBuf::from);
    let dump_count = p.usize("dump_count")?;
    cfg.finish()?;
    if let Some(dir) = &dump_dir {
        if !dir.is_dir() {
            return Err(CliError::io(format!("dump_maps: directory {} does not exist", dir.display())));
        }
    }

    let model: Arc<dyn PatchModel> = Arc::new(QuasiLocalSpectrum::new(sizes.clone(), v_rms)?);
    let sim = LayoutSimulator::new(sizes, v_rms, extent, pitch, law, generator)?;
    let maps = sim.ensemble(seed, realizations)?;
    let grid_ = sim.grid;

    let mut out = String::new();
    let w = &mut out;
    let _ = writeln!(w, "model = {}", model.describe());
    let _ = writeln!(w, "generator = {generator_name}");
    let _ = writeln!(w, "voltage_law = {}", p.get_str("voltage_law").unwrap_or("uniform"));
    let _ = writeln!(w, "grid = {} x {} pixels, pitch_nm = {:.6}, extent_um = {:.6}", grid_.n, grid_.n, grid_.pitch * 1e9, grid_.extent() * 1e6);
    let _ = writeln!(w, "realizations = {realizations}, seed = {seed}");
    let _ = write!(w, "{}", sim.calibration());

    let _ = writeln!(w, "\n# correlation C(r) in V^2, shell-averaged on the pixel lattice");
    for (r, e) in rs.iter().zip(empirical_correlations(&maps, &rs)?) {
        let analytic = lattice_shell(grid_.n, grid_.pitch, *r).average(|x| model.correlation(x));
        let (s, v) = verdict(&e, analytic);
        let _ = writeln!(
            w,
            "r_nm = {:.3}  empirical = {:.6e} +/- {:.2e}  analytic = {:.6e}  ({s:.2} sigma)  {v}",
            r * 1e9,
            e.value,
            e.std_error,
            analytic
        );
    }

    let _ = writeln!(w, "\n# spectrum C[k] in V^2 m^2, shell-averaged on the wavenumber lattice");
    let dk = 2.0 * std::f64::consts::PI / grid_.extent();
    for (k, e) in ks.iter().zip(empirical_spectra(&maps, &ks)?) {
        let analytic = lattice_shell(grid_.n, dk, *k).average(|q| model.density(q));
        let (s, v) = verdict(&e, analytic);
        let _ = writeln!(
            w,
            "k_per_um = {:.6}  empirical = {:.6e} +/- {:.2e}  analytic = {:.6e}  ({s:.2} sigma)  {v}",
            k * 1e-6,
            e.value,
            e.std_error,
            analytic
        );
    }

    let _ = writeln!(w, "\n# pressure between independent plates in Pa");
    let spectra = PlatePairSpectra::identical(model.clone());
    for (d, e) in ds.iter().zip(ensemble_pressure(&maps, &ds)?) {
        let analytic = patch_pressure_pp(&spectra, *d)?;
        let (s, v) = verdict(&e, analytic);
        let _ = writeln!(
            w,
            "D_nm = {:.3}  empirical = {:.6e} +/- {:.2e}  analytic = {:.6e}  (rel {:+.4}, {s:.2} sigma)  {v}",
            d * 1e9,
            e.value,
            e.std_error,
            analytic,
            e.value / analytic - 1.0
        );
    }

    let side = (window_patches * std::f64::consts::PI / 4.0 * moments.mean_square).sqrt();
    let window_pixels = ((side / grid_.pitch).round() as usize).clamp(1, grid_.n);
    let ws = window_scatter(&maps, window_distance, window_pixels, moments.mean_square)?;
    let _ = writeln!(w, "\n# ergodicity: pressure averaged over square windows");
    let _ = writeln!(
        w,
        "window_side_um = {:.6}  patch_areas = {:.3}  windows = {}  D_nm = {:.3}",
        ws.window_side * 1e6,
        ws.patch_areas,
        ws.windows,
        window_distance * 1e9
    );
    let _ = writeln!(
        w,
        "window_mean_pa = {:.6e}  window_std_pa = {:.6e}  relative_scatter = {:.4}",
        ws.mean,
        ws.std_dev,
        ws.relative_scatter()
    );

    if let Some(dir) = &dump_dir {
        let n = dump_count.unwrap_or(maps.len()).min(maps.len());
        for m in &maps[..n] {
            m.save(&dir.join(format!("map_{:06}.txt", m.seed)))?;
        }
        let _ = writeln!(w, "\ndumped {n} map(s) to {}", dir.display());
    }
    emit(&out, cfg.output.as_deref())
}
