use rayon::prelude::*;

use patchforce::lifshitz::{permittivity_models, GeneralizedPlasma, LifshitzCalculator, Permittivity};
use patchforce::numerics::constants::ideal_casimir_pressure;
use patchforce::Result as CoreResult;

use crate::config::{check_unused, grid, Quantity, RunConfig};
use crate::error::CliError;
use crate::table::{emit, Table};

/// Plasma frequency standing in for a perfect reflector.
const PROXY_OMEGA_P_EV: f64 = 1e4;

/// Plane–plane Lifshitz pressure magnitudes (attractive positive) for the
/// Drude-type and plasma-type prescriptions, with the ideal-conductor limit.
pub fn casimir(cfg: &RunConfig) -> Result<(), CliError> {
    let mut p = cfg.params.clone();
    for (key, default) in [("omega_p_ev", "8.9"), ("gamma_ev", "0.0357")] {
        if !p.contains(key) {
            p.insert(key, default);
        }
    }
    let temperature = p.f64("temperature_k")?.unwrap_or(295.0);
    let drude_name = p.get_str("drude_model").unwrap_or("drude").to_string();
    let plasma_name = p.get_str("plasma_model").unwrap_or("plasma").to_string();
    let proxy = p.bool("ideal_proxy")?.unwrap_or(false);
    let ds = grid(&p, "d", Quantity::Length, true, None)?;
    let models = permittivity_models();
    let drude = models.build(&drude_name, &p)?;
    let plasma = models.build(&plasma_name, &p)?;
    // The plasma prescription ignores the damping.
    p.f64("gamma_ev")?;
    check_unused(&cfg.command, &p)?;
    let calc = LifshitzCalculator::new(temperature)?;
    let ideal_reflector = GeneralizedPlasma::plasma(PROXY_OMEGA_P_EV)?;

    let magnitude = |m: &dyn Permittivity, d: f64| -> CoreResult<f64> { Ok(-calc.pressure(m, m, d)?.value) };
    let rows: Vec<CoreResult<Vec<f64>>> = ds
        .par_iter()
        .map(|&d| {
            let mut row = vec![d * 1e9, magnitude(drude.as_ref(), d)?, magnitude(plasma.as_ref(), d)?, ideal_casimir_pressure(d)];
            if proxy {
                row.push(magnitude(&ideal_reflector, d)?);
            }
            Ok(row)
        })
        .collect();

    let mut header = vec!["D_nm", "P_drude_Pa", "P_plasma_Pa", "P_ideal_Pa"];
    if proxy {
        header.push("P_proxy_Pa");
    }
    let mut t = Table::new(&header);
    let mut failed = 0;
    for (d, row) in ds.iter().zip(rows) {
        match row {
            Ok(r) => t.push(r),
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
