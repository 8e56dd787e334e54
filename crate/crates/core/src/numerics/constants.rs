//! Physical constants in SI units (CODATA 2018).

/// Vacuum permittivity ε₀ in F/m.
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;
/// Reduced Planck constant in J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Speed of light in m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Boltzmann constant in J/K.
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Elementary charge in C (also J per eV).
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Boltzmann constant in eV/K.
pub const BOLTZMANN_EV: f64 = BOLTZMANN / ELEMENTARY_CHARGE;
/// ħc in eV·m.
pub const HBAR_C_EV_M: f64 = HBAR * SPEED_OF_LIGHT / ELEMENTARY_CHARGE;
/// Apéry's constant ζ(3).
pub const ZETA3: f64 = 1.202_056_903_159_594_3;

/// Ideal-conductor Casimir pressure magnitude π²ħc/(240 d⁴) at zero temperature.
pub fn ideal_casimir_pressure(distance: f64) -> f64 {
    std::f64::consts::PI.powi(2) * HBAR * SPEED_OF_LIGHT / (240.0 * distance.powi(4))
}
