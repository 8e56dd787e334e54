use std::path::Path;
use std::sync::Arc;

use super::optical::OpticalDataTable;
use super::permittivity::{Drude, DrudeExtrapolated, GeneralizedPlasma, Oscillator, Permittivity};
use crate::error::{Error, Result};
use crate::params::ParamMap;
use crate::registry::Registry;

pub type PermittivityRegistry = Registry<Arc<dyn Permittivity>>;

/// `drude`, `plasma`, `generalized_plasma` and `drude_extrapolated`.
///
/// Keys: `omega_p_ev`, `gamma_ev`, `oscillators` (flat `f,ω,g,…` list in eV²/eV,
/// `placeholder_gold` (default) or `none`), `optical_table` (file path).
pub fn permittivity_models() -> PermittivityRegistry {
    let mut r = Registry::new("permittivity model");
    r.register("drude", "1 + Ω²/(ξ(ξ+γ))", |p| {
        Ok(Arc::new(Drude::new(p.require_f64("omega_p_ev")?, p.require_f64("gamma_ev")?)?) as Arc<dyn Permittivity>)
    })
    .register("plasma", "1 + Ω²/ξ²", |p| {
        Ok(Arc::new(GeneralizedPlasma::plasma(p.require_f64("omega_p_ev")?)?) as Arc<dyn Permittivity>)
    })
    .register(
        "generalized_plasma",
        "plasma term plus interband oscillators (placeholder gold set by default)",
        build_generalized_plasma,
    )
    .register(
        "drude_extrapolated",
        "Kramers–Kronig of a tabulated ε″ with a Drude low-frequency extension",
        build_drude_extrapolated,
    );
    r
}

fn build_generalized_plasma(p: &ParamMap) -> Result<Arc<dyn Permittivity>> {
    let omega_p = p.require_f64("omega_p_ev")?;
    let model = match p.get_str("oscillators").map(str::trim) {
        None | Some("placeholder_gold") => GeneralizedPlasma::placeholder_gold(omega_p)?,
        Some("none") | Some("") => GeneralizedPlasma::plasma(omega_p)?,
        Some(_) => {
            let flat = p.f64_list("oscillators")?.unwrap_or_default();
            if flat.len() % 3 != 0 {
                return Err(Error::invalid("oscillators", "expected triples f_j, ω_j, g_j"));
            }
            let osc = flat
                .chunks(3)
                .map(|c| Oscillator { strength: c[0], frequency: c[1], damping: c[2] })
                .collect();
            GeneralizedPlasma::new(omega_p, osc)?
        }
    };
    Ok(Arc::new(model))
}

fn build_drude_extrapolated(p: &ParamMap) -> Result<Arc<dyn Permittivity>> {
    let path = p
        .get_str("optical_table")
        .ok_or_else(|| Error::invalid("optical_table", "drude_extrapolated needs an optical data file"))?;
    let table = OpticalDataTable::load(Path::new(path))?;
    Ok(Arc::new(DrudeExtrapolated::new(
        Arc::new(table),
        p.require_f64("omega_p_ev")?,
        p.require_f64("gamma_ev")?,
    )?))
}
