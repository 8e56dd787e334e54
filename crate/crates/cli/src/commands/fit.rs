use std::path::Path;

use patchforce::fitting::{build_cache, fit_with_cache, patch_families, residual_table, FitSpec, ParameterSpec};
use patchforce::lifshitz::{permittivity_models, residual, LifshitzCalculator, LifshitzCurve, Observable, ResidualDataset};
use patchforce::{ParamMap, Result as CoreResult};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::table::{emit, Table};

const NM: f64 = 1e-9;

fn load_dataset(path: &Path) -> CoreResult<ResidualDataset> {
    ResidualDataset::load(path)
}

/// Fit setup from config keys; the observable defaults to the dataset's.
fn fit_spec(p: &ParamMap, dataset: &ResidualDataset) -> CoreResult<FitSpec> {
    let observable = match p.get_str("observable") {
        Some(s) => s.parse::<Observable>()?,
        None => dataset.observable,
    };
    let free_list = p.get_str("free").unwrap_or("l_max, v_rms").to_string();
    let mut free = Vec::new();
    for name in free_list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match name {
            "l_min" | "l_max" | "v_rms" => free.push(name.to_string()),
            other => {
                return Err(patchforce::Error::Invalid {
                    field: "free".into(),
                    reason: format!("unknown parameter `{other}` (expected l_min, l_max, v_rms)"),
                })
            }
        }
    }
    let is_free = |n: &str| free.iter().any(|f| f == n);
    let bounded = |base: &str, voltage: bool, defaults: (f64, f64)| -> CoreResult<ParameterSpec> {
        let read = |k: &str| if voltage { p.voltage(k) } else { p.length(k) };
        let lo = read(&format!("{base}_lower"))?.unwrap_or(defaults.0);
        let hi = read(&format!("{base}_upper"))?.unwrap_or(defaults.1);
        Ok(ParameterSpec::free(lo, hi))
    };

    let l_min = if is_free("l_min") {
        let lo = p.require_length("l_min_lower")?;
        let hi = p.require_length("l_min_upper")?;
        ParameterSpec::free(lo, hi)
    } else {
        ParameterSpec::fixed(p.require_length("l_min")?)
    };
    let l_min_ref = if l_min.free { l_min.lower } else { l_min.value };
    let l_max = if is_free("l_max") {
        bounded("l_max", false, (2.0 * l_min_ref, 1000.0 * l_min_ref))?
    } else {
        ParameterSpec::fixed(p.require_length("l_max")?)
    };
    let v_rms = if is_free("v_rms") {
        bounded("v_rms", true, (1e-4, 1.0))?
    } else {
        ParameterSpec::fixed(p.require_voltage("v_rms")?)
    };

    let mut spec = FitSpec::new(observable, l_min_ref, (1.0, 2.0), (1.0, 2.0));
    spec.l_min = l_min;
    spec.l_max = l_max;
    spec.v_rms = v_rms;
    spec.radius = p.length("radius")?;
    let family = p.get_str("model").unwrap_or("quasi_local").to_string();
    spec.family = patch_families().build(&family, p)?;
    if let Some(s) = p.u64("seed")? {
        spec.seed = s;
    }
    if let Some(r) = p.usize("restarts")? {
        spec.restarts = r;
    }
    if let Some(c) = p.bool("cache")? {
        spec.use_cache = c;
    }
    Ok(spec)
}

/// Prints the fit report; the residual-after-fit table also goes to `--output`.
pub fn fit(cfg: &RunConfig) -> Result<(), CliError> {
    let path = cfg.require_input_path("data")?;
    let p = &cfg.params;
    let dataset = load_dataset(&path)?;
    let spec = fit_spec(p, &dataset)?;
    cfg.finish()?;
    let result = fit_with_cache(&dataset, &spec, None)?;
    let report = result.report(&dataset, &spec)?;
    print!("{report}");
    if let Some(out) = cfg.output.as_deref() {
        let model = patchforce::fitting::model_values(&dataset, &result.params, &spec)?;
        emit(&residual_table(&dataset, &model), Some(out))?;
    }
    if !result.converged {
        return Err(CliError::numerical("fit did not converge; best-so-far values reported"));
    }
    Ok(())
}

/// Refits measured totals after subtracting the Lifshitz prediction for each
/// `(omega_p_ev, gamma_ev)` pair on the scan grid.
pub fn sensitivity(cfg: &RunConfig) -> Result<(), CliError> {
    let path = cfg.require_input_path("data")?;
    let table_path = cfg.input_path("optical_table")?;
    let p = &cfg.params;
    let measured = load_dataset(&path)?;
    let spec = fit_spec(p, &measured)?;
    let omegas = p.f64_list("omega_p_ev")?.unwrap_or_else(|| vec![8.9]);
    let gammas = p.f64_list("gamma_ev")?.unwrap_or_else(|| vec![0.0357]);
    let temperature = p.f64("temperature_k")?.unwrap_or(295.0);
    let model_name = p.get_str("drude_model").unwrap_or("drude").to_string();
    let oscillators = p.get_str("oscillators").map(str::to_string);
    cfg.finish()?;

    let calc = LifshitzCalculator::new(temperature)?;
    let radius = spec.radius.or(measured.radius);
    let ds = measured.distances();
    let d_range = (ds.iter().copied().fold(f64::INFINITY, f64::min), ds.iter().copied().fold(0.0, f64::max));
    let cache = if spec.use_cache && !spec.l_min.free { Some(build_cache(&spec, radius, d_range)?) } else { None };

    let mut t = Table::new(&[
        "omega_p_ev",
        "gamma_ev",
        "l_min_nm",
        "l_max_nm",
        "v_rms_mv",
        "reduced_chi_squared",
        "converged",
        "l_max_weakly_constrained",
    ]);
    let mut failed = 0;
    for &omega in &omegas {
        for &gamma in &gammas {
            let mut optics = ParamMap::new().with("omega_p_ev", omega).with("gamma_ev", gamma);
            if let Some(tp) = &table_path {
                optics.insert("optical_table", tp.display().to_string());
            }
            if let Some(o) = &oscillators {
                optics.insert("oscillators", o.clone());
            }
            let run = || -> CoreResult<_> {
                let m = permittivity_models().build(&model_name, &optics)?;
                let curve = LifshitzCurve::new(m.clone(), m, calc.clone(), measured.observable, radius)?;
                let resid = residual(&measured, &curve)?;
                fit_with_cache(&resid, &spec, cache.as_ref())
            };
            match run() {
                Ok(r) => {
                    if !r.converged {
                        failed += 1;
                        eprintln!("omega_p = {omega} eV, gamma = {gamma} eV: fit did not converge");
                    }
                    t.push(vec![
                        omega,
                        gamma,
                        r.params.l_min / NM,
                        r.params.l_max / NM,
                        r.params.v_rms * 1e3,
                        r.reduced_chi_squared,
                        if r.converged { 1.0 } else { 0.0 },
                        if r.weakly_constrained.contains(&patchforce::fitting::FitParameter::LMax) { 1.0 } else { 0.0 },
                    ]);
                }
                Err(e) => {
                    failed += 1;
                    eprintln!("omega_p = {omega} eV, gamma = {gamma} eV: {e}");
                }
            }
        }
    }
    emit(&t.to_csv(), cfg.output.as_deref())?;
    if failed > 0 {
        return Err(CliError::numerical(format!("{failed} scan point(s) failed or did not converge")));
    }
    Ok(())
}

