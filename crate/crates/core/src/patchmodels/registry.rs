use std::sync::Arc;

use super::{PatchModel, QuasiLocalSpectrum, SharpCutoffSpectrum, SizeDistribution};
use crate::error::{Error, Result};
use crate::params::ParamMap;
use crate::registry::Registry;

pub type PatchModelRegistry = Registry<Arc<dyn PatchModel>>;
pub type SizeDistributionRegistry = Registry<SizeDistribution>;

/// `uniform` (l_min, l_max), `delta` (size) and `log_normal` (median, sigma_log).
pub fn size_distributions() -> SizeDistributionRegistry {
    let mut r = Registry::new("size distribution");
    r.register("uniform", "flat between l_min and l_max", |p| {
        SizeDistribution::uniform(p.require_length("l_min")?, p.require_length("l_max")?)
    })
    .register("delta", "every patch has diameter `size`", |p| {
        SizeDistribution::delta(p.require_length("size")?)
    })
    .register("log_normal", "log-normal with `median` and `sigma_log`, truncated at ±8σ", |p| {
        SizeDistribution::log_normal(p.require_length("median")?, p.require_f64("sigma_log")?)
    });
    r
}

/// `sharp_cutoff` and `quasi_local`.
pub fn patch_models() -> PatchModelRegistry {
    let mut r = Registry::new("patch model");
    r.register(
        "sharp_cutoff",
        "flat spectrum on k_min..k_max (or 2π/l_max..2π/l_min)",
        build_sharp_cutoff,
    )
    .register(
        "quasi_local",
        "same-patch-only correlations over a size `distribution`",
        build_quasi_local,
    );
    r
}

fn build_sharp_cutoff(p: &ParamMap) -> Result<Arc<dyn PatchModel>> {
    let v = p.require_voltage("v_rms")?;
    let model = match (p.wavenumber("k_min")?, p.wavenumber("k_max")?) {
        (Some(a), Some(b)) => SharpCutoffSpectrum::new(a, b, v)?,
        (None, None) => SharpCutoffSpectrum::from_grain_sizes(p.require_length("l_min")?, p.require_length("l_max")?, v)?,
        _ => return Err(Error::invalid("k_min/k_max", "give both cutoffs or neither")),
    };
    Ok(Arc::new(model))
}

fn build_quasi_local(p: &ParamMap) -> Result<Arc<dyn PatchModel>> {
    let law = p.get_str("distribution").unwrap_or("uniform").to_string();
    let sizes = size_distributions().build(&law, p)?;
    Ok(Arc::new(QuasiLocalSpectrum::new(sizes, p.require_voltage("v_rms")?)?))
}
