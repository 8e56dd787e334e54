use patchforce::pressure::{
    large_patch_pressure, patch_energy_pp, patch_pressure_pp, pfa_force, pfa_gradient, small_patch_pressure,
    PlatePairSpectra, SpherePlaneGeometry,
};
use patchforce::ParamMap;

use super::{has_key, patch_model};
use crate::config::{check_unused, grid, Quantity, RunConfig};
use crate::error::CliError;
use crate::table::{emit, Table};

const VOLT_UNITS: &[&str] = &["v", "mv"];

/// Params with `v_rms = 1 V` supplied when a normalized curve omits it.
fn curve_params(cfg: &RunConfig) -> Result<(ParamMap, bool), CliError> {
    let mut p = cfg.params.clone();
    let normalized = p.bool("normalized")?.unwrap_or(false);
    if normalized && !has_key(&p, "v_rms", VOLT_UNITS) {
        p.insert("v_rms_v", "1");
    }
    Ok((p, normalized))
}

pub fn spectrum(cfg: &RunConfig) -> Result<(), CliError> {
    let (p, normalized) = curve_params(cfg)?;
    let model = patch_model(&p)?;
    let ks = grid(&p, "k", Quantity::Wavenumber, false, None)?;
    check_unused(&cfg.command, &p)?;
    let scale = if normalized { 1.0 / (model.v_rms() * model.v_rms()) } else { 1.0 };
    let mut t = Table::new(&["k_per_m", if normalized { "C_over_vrms2_m2" } else { "C_V2_m2" }]);
    for k in ks {
        t.push(vec![k, model.density(k) * scale]);
    }
    emit(&t.to_csv(), cfg.output.as_deref())
}

pub fn correlation(cfg: &RunConfig) -> Result<(), CliError> {
    let (p, normalized) = curve_params(cfg)?;
    let model = patch_model(&p)?;
    let rs = grid(&p, "r", Quantity::Length, false, None)?;
    check_unused(&cfg.command, &p)?;
    let scale = if normalized { 1.0 / (model.v_rms() * model.v_rms()) } else { 1.0 };
    let mut t = Table::new(&["r_m", if normalized { "C_over_vrms2" } else { "C_V2" }]);
    for r in rs {
        t.push(vec![r, model.correlation(r) * scale]);
    }
    emit(&t.to_csv(), cfg.output.as_deref())
}

/// Identical uncorrelated plates. Rows whose quadrature fails are reported on
/// stderr and skipped; the command then exits with the numerical error code.
pub fn pressure(cfg: &RunConfig) -> Result<(), CliError> {
    let p = &cfg.params;
    let model = patch_model(p)?;
    let radius = p.require_length("radius")?;
    let ds = grid(p, "d", Quantity::Length, true, None)?;
    cfg.finish()?;
    let spectra = PlatePairSpectra::identical(model.clone());
    let mean_square_difference = 2.0 * model.v_rms() * model.v_rms();
    let zero_k_sum = 2.0 * model.density(0.0);
    let mut t = Table::new(&[
        "D_nm",
        "P_pp_Pa",
        "G_sp_N_per_m",
        "F_sp_N",
        "P_large_patch_Pa",
        "P_small_patch_Pa",
    ]);
    let mut failed = 0;
    for d in ds {
        let row = patch_pressure_pp(&spectra, d).and_then(|pp| Ok((pp, patch_energy_pp(&spectra, d)?)));
        match row {
            Ok((pp, e)) => {
                let g = SpherePlaneGeometry::new(radius, d)?;
                t.push(vec![
                    d * 1e9,
                    pp,
                    pfa_gradient(&g, pp),
                    pfa_force(&g, e),
                    large_patch_pressure(mean_square_difference, d),
                    small_patch_pressure(zero_k_sum, d),
                ]);
            }
            Err(e) => {
                failed += 1;
                eprintln!("D = {} nm: {e}", d * 1e9);
            }
        }
    }
    emit(&t.to_csv(), cfg.output.as_deref())?;
    if failed > 0 {
        return Err(CliError::numerical(format!("{failed} distance(s) failed; remaining rows written")));
    }
    Ok(())
}
