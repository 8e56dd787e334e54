//! Dielectric response on the imaginary frequency axis, `ε(iξ)` with `ξ` in eV.

use std::f64::consts::FRAC_PI_2;
use std::fmt::Debug;
use std::sync::Arc;

use super::optical::OpticalDataTable;
use crate::error::{Error, Result};

/// Behaviour at ξ = 0, where `ε(iξ)` itself may diverge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StaticResponse {
    /// Ohmic conductor: `r_TM = 1`, `r_TE = 0`.
    Conductor,
    /// Dissipationless conductor with plasma energy `omega_p` (eV): `r_TM = 1`,
    /// `r_TE = (q − √(q² + Ω²/c²)) / (q + √(q² + Ω²/c²))`.
    Plasma { omega_p: f64 },
    /// Insulator with finite static permittivity: `r_TM = (ε₀−1)/(ε₀+1)`, `r_TE = 0`.
    Dielectric { eps0: f64 },
}

pub trait Permittivity: Debug + Send + Sync {
    fn name(&self) -> &'static str;

    /// `ε(iξ)` for `ξ > 0` (eV). Callers go through [`epsilon_imaginary_axis`].
    fn epsilon(&self, xi: f64) -> f64;

    fn static_response(&self) -> StaticResponse;

    fn describe(&self) -> String;
}

pub fn epsilon_imaginary_axis(model: &dyn Permittivity, xi: f64) -> Result<f64> {
    if !(xi > 0.0) || xi.is_nan() {
        return Err(Error::invalid("xi", format!("imaginary frequency must be positive, got {xi} eV")));
    }
    if xi.is_infinite() {
        return Ok(1.0);
    }
    Ok(model.epsilon(xi))
}

fn check_plasma(omega_p: f64) -> Result<()> {
    if !(omega_p > 0.0 && omega_p.is_finite()) {
        return Err(Error::invalid("omega_p", format!("must be positive, got {omega_p} eV")));
    }
    Ok(())
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(Error::invalid("gamma", format!("must be non-negative, got {gamma} eV")));
    }
    Ok(())
}

/// `1 + Ω²/(ξ(ξ+γ))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Drude {
    pub omega_p: f64,
    pub gamma: f64,
}

impl Drude {
    pub fn new(omega_p: f64, gamma: f64) -> Result<Self> {
        check_plasma(omega_p)?;
        check_gamma(gamma)?;
        Ok(Drude { omega_p, gamma })
    }
}

impl Permittivity for Drude {
    fn name(&self) -> &'static str {
        "drude"
    }

    fn epsilon(&self, xi: f64) -> f64 {
        1.0 + self.omega_p * self.omega_p / (xi * (xi + self.gamma))
    }

    fn static_response(&self) -> StaticResponse {
        if self.gamma > 0.0 {
            StaticResponse::Conductor
        } else {
            StaticResponse::Plasma { omega_p: self.omega_p }
        }
    }

    fn describe(&self) -> String {
        format!("drude(omega_p = {} eV, gamma = {} eV)", self.omega_p, self.gamma)
    }
}

/// Lorentz oscillator `f/(ω₀² + ξg + ξ²)`; `strength` in eV², `frequency` and `damping` in eV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Oscillator {
    pub strength: f64,
    pub frequency: f64,
    pub damping: f64,
}

/// PLACEHOLDER interband oscillators for gold. These numbers are not taken from
/// any published fit; replace them with a cited parameter set before drawing
/// physical conclusions.
pub const PLACEHOLDER_GOLD_OSCILLATORS: [Oscillator; 6] = [
    Oscillator { strength: 7.091, frequency: 3.05, damping: 0.75 },
    Oscillator { strength: 41.46, frequency: 4.15, damping: 1.85 },
    Oscillator { strength: 2.7, frequency: 5.4, damping: 1.0 },
    Oscillator { strength: 154.7, frequency: 8.5, damping: 7.0 },
    Oscillator { strength: 44.55, frequency: 13.5, damping: 6.0 },
    Oscillator { strength: 309.6, frequency: 21.5, damping: 9.0 },
];

/// `1 + Ω²/ξ² + Σ_j f_j/(ω_j² + ξg_j + ξ²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedPlasma {
    pub omega_p: f64,
    pub oscillators: Vec<Oscillator>,
    pub placeholder: bool,
}

impl GeneralizedPlasma {
    pub fn new(omega_p: f64, oscillators: Vec<Oscillator>) -> Result<Self> {
        check_plasma(omega_p)?;
        for (j, o) in oscillators.iter().enumerate() {
            if !(o.strength >= 0.0 && o.strength.is_finite()) {
                return Err(Error::invalid("oscillators", format!("strength of oscillator {j} must be >= 0")));
            }
            if !(o.frequency > 0.0 && o.frequency.is_finite() && o.damping >= 0.0 && o.damping.is_finite()) {
                return Err(Error::invalid(
                    "oscillators",
                    format!("oscillator {j} needs frequency > 0 and damping >= 0"),
                ));
            }
        }
        Ok(GeneralizedPlasma {
            omega_p,
            oscillators,
            placeholder: false,
        })
    }

    /// Plasma model without interband terms.
    pub fn plasma(omega_p: f64) -> Result<Self> {
        Self::new(omega_p, Vec::new())
    }

    /// Plasma term plus [`PLACEHOLDER_GOLD_OSCILLATORS`].
    pub fn placeholder_gold(omega_p: f64) -> Result<Self> {
        let mut m = Self::new(omega_p, PLACEHOLDER_GOLD_OSCILLATORS.to_vec())?;
        m.placeholder = true;
        Ok(m)
    }
}

impl Permittivity for GeneralizedPlasma {
    fn name(&self) -> &'static str {
        if self.oscillators.is_empty() {
            "plasma"
        } else {
            "generalized_plasma"
        }
    }

    fn epsilon(&self, xi: f64) -> f64 {
        let bound: f64 = self
            .oscillators
            .iter()
            .map(|o| o.strength / (o.frequency * o.frequency + xi * o.damping + xi * xi))
            .sum();
        1.0 + (self.omega_p / xi).powi(2) + bound
    }

    fn static_response(&self) -> StaticResponse {
        StaticResponse::Plasma { omega_p: self.omega_p }
    }

    fn describe(&self) -> String {
        let tag = if self.placeholder { ", PLACEHOLDER gold oscillators" } else { "" };
        format!(
            "{}(omega_p = {} eV, {} oscillators{tag})",
            self.name(),
            self.omega_p,
            self.oscillators.len()
        )
    }
}

/// Tabulated `ε″` turned into `ε(iξ)` by Kramers–Kronig:
/// `ε(iξ) = 1 + (2/π) ∫₀^∞ ω ε″(ω) / (ω² + ξ²) dω`.
///
/// Below the first row `ε″` is the Drude imaginary part `Ω²γ/(ω(ω²+γ²))`;
/// between rows it is linear in ω; above the last row it falls off as `ω⁻³`
/// from the last tabulated value.
#[derive(Debug, Clone)]
pub struct DrudeExtrapolated {
    table: Arc<OpticalDataTable>,
    pub omega_p: f64,
    pub gamma: f64,
}

impl DrudeExtrapolated {
    pub fn new(table: Arc<OpticalDataTable>, omega_p: f64, gamma: f64) -> Result<Self> {
        check_plasma(omega_p)?;
        check_gamma(gamma)?;
        Ok(DrudeExtrapolated { table, omega_p, gamma })
    }

    pub fn table(&self) -> &OpticalDataTable {
        &self.table
    }

    /// `∫₀^W ω ε″_Drude/(ω²+ξ²) dω`.
    fn below_table(&self, w: f64, xi: f64) -> f64 {
        let op2 = self.omega_p * self.omega_p;
        let g = self.gamma;
        if g == 0.0 {
            // ε″ collapses to a delta at ω = 0 carrying the plasma term.
            return FRAC_PI_2 * op2 / (xi * xi);
        }
        let f = |a: f64| (w / a).atan() / a;
        if (xi - g).abs() <= 1e-6 * g {
            let a = 0.5 * (xi + g);
            let fp = -w / (a * (a * a + w * w)) - (w / a).atan() / (a * a);
            return op2 * g * (-fp / (2.0 * a));
        }
        op2 * g * (f(g) - f(xi)) / (xi * xi - g * g)
    }

    /// `∫_{ω₁}^{ω₂} ω (a + bω)/(ω²+ξ²) dω` for the linear segment through both rows.
    fn segment(w1: f64, e1: f64, w2: f64, e2: f64, xi: f64) -> f64 {
        let b = (e2 - e1) / (w2 - w1);
        let a = e1 - b * w1;
        let log_part = 0.5 * a * ((w2 * w2 - w1 * w1) / (w1 * w1 + xi * xi)).ln_1p();
        let lin_part = b * xi * (u_minus_atan(w2 / xi) - u_minus_atan(w1 / xi));
        log_part + lin_part
    }

    /// `∫_E^∞ ω ε″_E (E/ω)³/(ω²+ξ²) dω`.
    fn above_table(e: f64, eps_e: f64, xi: f64) -> f64 {
        let r = xi / e;
        if r < 1e-3 {
            return eps_e * (1.0 / 3.0 - r * r / 5.0 + r.powi(4) / 7.0);
        }
        eps_e * e.powi(3) / (xi * xi) * (1.0 / e - (FRAC_PI_2 - (e / xi).atan()) / xi)
    }
}

/// `u − atan(u)`, accurate for small `u`.
fn u_minus_atan(u: f64) -> f64 {
    if u.abs() < 0.1 {
        let u2 = u * u;
        u * u2 * (1.0 / 3.0 - u2 * (1.0 / 5.0 - u2 * (1.0 / 7.0 - u2 * (1.0 / 9.0 - u2 * (1.0 / 11.0 - u2 / 13.0)))))
    } else {
        u - u.atan()
    }
}

impl Permittivity for DrudeExtrapolated {
    fn name(&self) -> &'static str {
        "drude_extrapolated"
    }

    fn epsilon(&self, xi: f64) -> f64 {
        let rows = self.table.rows();
        let mut integral = self.below_table(rows[0].energy, xi);
        for w in rows.windows(2) {
            integral += Self::segment(w[0].energy, w[0].eps_imag, w[1].energy, w[1].eps_imag, xi);
        }
        let last = rows[rows.len() - 1];
        integral += Self::above_table(last.energy, last.eps_imag, xi);
        1.0 + integral / FRAC_PI_2
    }

    fn static_response(&self) -> StaticResponse {
        if self.gamma > 0.0 {
            StaticResponse::Conductor
        } else {
            StaticResponse::Plasma { omega_p: self.omega_p }
        }
    }

    fn describe(&self) -> String {
        format!(
            "drude_extrapolated(omega_p = {} eV, gamma = {} eV, table = {} with {} rows)",
            self.omega_p,
            self.gamma,
            self.table.source,
            self.table.rows().len()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lifshitz::optical::OpticalRow;

    #[test]
    fn drude_term() {
        let m = Drude::new(8.9, 0.0357).unwrap();
        let e = epsilon_imaginary_axis(&m, 1.0).unwrap();
        assert!((e - (1.0 + 79.21 / 1.0357)).abs() < 1e-12);
        assert!((e - 77.48).abs() < 0.005);
        assert!(epsilon_imaginary_axis(&m, 0.0).is_err());
        assert!(epsilon_imaginary_axis(&m, -1.0).is_err());
    }

    #[test]
    fn plasma_at_its_own_frequency() {
        let m = GeneralizedPlasma::plasma(8.9).unwrap();
        assert!((epsilon_imaginary_axis(&m, 8.9).unwrap() - 2.0).abs() < 1e-15);
        assert_eq!(m.name(), "plasma");
    }

    #[test]
    fn transparent_at_infinity() {
        let table = Arc::new(
            OpticalDataTable::new(
                vec![
                    OpticalRow { energy: 0.1, eps_real: -5000.0, eps_imag: 1000.0 },
                    OpticalRow { energy: 10.0, eps_real: 0.5, eps_imag: 1.0 },
                ],
                "t",
            )
            .unwrap(),
        );
        let models: Vec<Box<dyn Permittivity>> = vec![
            Box::new(Drude::new(8.9, 0.0357).unwrap()),
            Box::new(GeneralizedPlasma::placeholder_gold(8.9).unwrap()),
            Box::new(DrudeExtrapolated::new(table, 8.9, 0.0357).unwrap()),
        ];
        for m in &models {
            assert!(epsilon_imaginary_axis(m.as_ref(), 1e9).unwrap() - 1.0 < 1e-12);
            assert_eq!(epsilon_imaginary_axis(m.as_ref(), f64::INFINITY).unwrap(), 1.0);
        }
    }

    #[test]
    fn pure_drude_table_reproduces_closed_form() {
        // Table holding the exact Drude ε″ up to an energy where the ω⁻³ tail takes over.
        let (op, g) = (9.0, 0.035);
        let rows: Vec<OpticalRow> = (0..4000)
            .map(|i| {
                let w = 0.05 * (1.0f64 + 0.003).powi(i);
                OpticalRow { energy: w, eps_real: 0.0, eps_imag: op * op * g / (w * (w * w + g * g)) }
            })
            .collect();
        let m = DrudeExtrapolated::new(Arc::new(OpticalDataTable::new(rows, "drude").unwrap()), op, g).unwrap();
        let exact = Drude::new(op, g).unwrap();
        for &xi in &[1e-3, 0.035, 0.1, 1.0, 10.0, 100.0] {
            let want = exact.epsilon(xi);
            let got = m.epsilon(xi);
            assert!((got / want - 1.0).abs() < 1e-5, "xi={xi}: {got} vs {want}");
        }
    }

    #[test]
    fn gamma_equal_to_xi_is_continuous() {
        let rows = vec![
            OpticalRow { energy: 0.2, eps_real: 0.0, eps_imag: 50.0 },
            OpticalRow { energy: 1.0, eps_real: 0.0, eps_imag: 2.0 },
        ];
        let m = DrudeExtrapolated::new(Arc::new(OpticalDataTable::new(rows, "t").unwrap()), 9.0, 0.05).unwrap();
        let at = m.epsilon(0.05);
        let near = m.epsilon(0.05 * (1.0 + 1e-5));
        assert!((at - near).abs() < 1e-4 * at);
    }

    #[test]
    fn static_responses() {
        assert_eq!(Drude::new(9.0, 0.03).unwrap().static_response(), StaticResponse::Conductor);
        assert_eq!(Drude::new(9.0, 0.0).unwrap().static_response(), StaticResponse::Plasma { omega_p: 9.0 });
        assert!(Drude::new(0.0, 0.03).is_err());
        assert!(Drude::new(9.0, -0.1).is_err());
        let bad = Oscillator { strength: -1.0, frequency: 1.0, damping: 0.0 };
        assert!(GeneralizedPlasma::new(9.0, vec![bad]).is_err());
    }
}
