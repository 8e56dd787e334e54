pub mod casimir;
pub mod curves;
pub mod fit;
pub mod simulate;

use std::sync::Arc;

use patchforce::fitting::patch_families;
use patchforce::layoutsim::layout_generators;
use patchforce::lifshitz::permittivity_models;
use patchforce::patchmodels::registry::{patch_models, size_distributions};
use patchforce::patchmodels::{PatchModel, SizeDistribution};
use patchforce::pressure::{validity_ratio, SpherePlaneGeometry};
use patchforce::ParamMap;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::table::emit;

pub fn has_key(p: &ParamMap, base: &str, units: &[&str]) -> bool {
    units.iter().any(|u| p.contains(&format!("{base}_{u}")))
}

/// The patch model named by `model` (default `quasi_local`).
pub fn patch_model(p: &ParamMap) -> Result<Arc<dyn PatchModel>, CliError> {
    let name = p.get_str("model").unwrap_or("quasi_local").to_string();
    Ok(patch_models().build(&name, p)?)
}

/// The size law named by `distribution` (default `uniform`).
pub fn size_law(p: &ParamMap) -> Result<SizeDistribution, CliError> {
    let name = p.get_str("distribution").unwrap_or("uniform").to_string();
    Ok(size_distributions().build(&name, p)?)
}

pub fn list() -> Result<(), CliError> {
    let mut out = String::new();
    let mut section = |kind: &str, entries: Vec<(&'static str, &'static str)>| {
        out.push_str(&format!("{kind}:\n"));
        for (name, desc) in entries {
            out.push_str(&format!("  {name:<20} {desc}\n"));
        }
    };
    section("patch models (model)", patch_models().describe());
    section("size distributions (distribution)", size_distributions().describe());
    section("fit models (fit: model)", patch_families().describe());
    section("permittivity models (drude_model, plasma_model)", permittivity_models().describe());
    section("layout generators (generator)", layout_generators().describe());
    emit(&out, None)
}

/// Interaction area `πRD` against the mean patch area `(π/4)⟨ℓ²⟩`.
pub fn validate(cfg: &RunConfig) -> Result<(), CliError> {
    let p = &cfg.params;
    let radius = p.require_length("radius")?;
    let distance = p.require_length("distance")?;
    let mean_square = match p.length("rms_size")? {
        Some(rms) => rms * rms,
        None => size_law(p)?.moments().mean_square,
    };
    cfg.finish()?;
    let geometry = SpherePlaneGeometry::new(radius, distance)?;
    let report = validity_ratio(&geometry, mean_square);
    let text = format!(
        "radius_um = {:.6}\ndistance_nm = {:.6}\nrms_size_nm = {:.6}\n{report}",
        radius * 1e6,
        distance * 1e9,
        mean_square.sqrt() * 1e9
    );
    emit(&text, cfg.output.as_deref())
}
