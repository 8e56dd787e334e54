//! Finite-temperature Lifshitz pressure and energy between two half-spaces.
//!
//! With `y = 2qd` and `y_n = 2dξ_n/(ħc)`:
//!
//! `P = −(k_BT/π) Σ'_n 1/(8d³) ∫_{y_n}^∞ y² Σ_p r₁r₂e^{−y}/(1 − r₁r₂e^{−y}) dy`
//!
//! `E = (k_BT/2π) Σ'_n 1/(4d²) ∫_{y_n}^∞ y Σ_p ln(1 − r₁r₂e^{−y}) dy`
//!
//! where `Σ'` halves the `n = 0` term. Negative values are attractive.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use super::permittivity::{Permittivity, StaticResponse};
use crate::error::{Error, Result};
use crate::numerics::constants::{BOLTZMANN, BOLTZMANN_EV, HBAR_C_EV_M};
use crate::numerics::Quadrature;

const BATCH: usize = 64;
const MIN_TERMS: usize = 10;
const MAX_TERMS: usize = 2_000_000;

/// Multiplicative correction `P → factor(d)·P` applied after the Matsubara sum.
pub trait RoughnessFactor: fmt::Debug + Send + Sync {
    fn factor(&self, distance: f64) -> f64;
}

/// Linear interpolation in `(distance, factor)` pairs; constant beyond the ends.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedRoughness {
    points: Vec<(f64, f64)>,
}

impl TabulatedRoughness {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("roughness", "needs at least one point"));
        }
        if points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::invalid("roughness", "distances must increase strictly"));
        }
        if points.iter().any(|p| !(p.1 > 0.0 && p.1.is_finite())) {
            return Err(Error::invalid("roughness", "factors must be positive"));
        }
        Ok(TabulatedRoughness { points })
    }
}

impl RoughnessFactor for TabulatedRoughness {
    fn factor(&self, d: f64) -> f64 {
        let p = &self.points;
        if d <= p[0].0 {
            return p[0].1;
        }
        if d >= p[p.len() - 1].0 {
            return p[p.len() - 1].1;
        }
        let i = p.partition_point(|q| q.0 <= d) - 1;
        let t = (d - p[i].0) / (p[i + 1].0 - p[i].0);
        p[i].1 + t * (p[i + 1].1 - p[i].1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatsubaraSum {
    pub value: f64,
    /// Terms in the accepted (doubled) sum.
    pub terms: usize,
    /// Relative change between the cutoff and the doubled cutoff.
    pub doubling_change: f64,
}

#[derive(Debug, Clone)]
pub struct LifshitzCalculator {
    pub temperature: f64,
    /// A term below `stop_tol` of the running total ends the sum.
    pub stop_tol: f64,
    /// Largest accepted relative change when the cutoff is doubled.
    pub doubling_tol: f64,
    pub roughness: Option<Arc<dyn RoughnessFactor>>,
}

#[derive(Clone, Copy)]
enum Quantity {
    Pressure,
    Energy,
}

impl LifshitzCalculator {
    pub fn new(temperature: f64) -> Result<Self> {
        if !(temperature > 0.0 && temperature.is_finite()) {
            return Err(Error::invalid("temperature", format!("must be positive, got {temperature} K")));
        }
        Ok(LifshitzCalculator {
            temperature,
            stop_tol: 1e-8,
            doubling_tol: 1e-6,
            roughness: None,
        })
    }

    pub fn with_roughness(mut self, r: Arc<dyn RoughnessFactor>) -> Self {
        self.roughness = Some(r);
        self
    }

    /// Plane–plane pressure in Pa, negative for attraction.
    pub fn pressure(&self, m1: &dyn Permittivity, m2: &dyn Permittivity, d: f64) -> Result<MatsubaraSum> {
        self.run(m1, m2, d, Quantity::Pressure)
    }

    /// Plane–plane interaction energy per area in J/m², negative for attraction.
    pub fn energy(&self, m1: &dyn Permittivity, m2: &dyn Permittivity, d: f64) -> Result<MatsubaraSum> {
        self.run(m1, m2, d, Quantity::Energy)
    }

    fn run(&self, m1: &dyn Permittivity, m2: &dyn Permittivity, d: f64, q: Quantity) -> Result<MatsubaraSum> {
        if !(d > 0.0 && d.is_finite()) {
            return Err(Error::invalid("distance", format!("must be positive, got {d:e} m")));
        }
        let step = 2.0 * d * 2.0 * PI * BOLTZMANN_EV * self.temperature / HBAR_C_EV_M;
        let term = |n: usize| matsubara_term(m1, m2, n, step, d, q);

        let mut terms: Vec<f64> = Vec::new();
        let mut total = 0.0;
        let mut cutoff = None;
        while cutoff.is_none() {
            if terms.len() >= MAX_TERMS {
                return Err(Error::Matsubara {
                    terms: terms.len(),
                    last_term: *terms.last().unwrap_or(&0.0),
                    total,
                });
            }
            let start = terms.len();
            let batch = (start..start + BATCH).into_par_iter().map(term).collect::<Result<Vec<f64>>>()?;
            for (i, t) in batch.into_iter().enumerate() {
                let n = start + i;
                total += if n == 0 { 0.5 * t } else { t };
                terms.push(t);
                if cutoff.is_none() && n + 1 >= MIN_TERMS && t.abs() <= self.stop_tol * total.abs() {
                    cutoff = Some(n + 1);
                }
            }
        }
        // Double the cutoff until the added terms change the sum by less than `doubling_tol`.
        let mut n_cut = cutoff.unwrap_or(terms.len());
        let sum_to = |ts: &[f64]| -> f64 { 0.5 * ts[0] + ts[1..].iter().sum::<f64>() };
        let (doubled, change) = loop {
            if 2 * n_cut > MAX_TERMS {
                return Err(Error::Matsubara {
                    terms: terms.len(),
                    last_term: *terms.last().unwrap_or(&0.0),
                    total: sum_to(&terms),
                });
            }
            if terms.len() < 2 * n_cut {
                let extra = (terms.len()..2 * n_cut).into_par_iter().map(term).collect::<Result<Vec<f64>>>()?;
                terms.extend(extra);
            }
            let truncated = sum_to(&terms[..n_cut]);
            let doubled = sum_to(&terms[..2 * n_cut]);
            let change = if doubled == 0.0 { 0.0 } else { ((doubled - truncated) / doubled).abs() };
            if change < self.doubling_tol {
                break (doubled, change);
            }
            n_cut *= 2;
        };
        let prefactor = match q {
            Quantity::Pressure => -BOLTZMANN * self.temperature / PI / (8.0 * d.powi(3)),
            Quantity::Energy => BOLTZMANN * self.temperature / (2.0 * PI) / (4.0 * d * d),
        };
        let factor = self.roughness.as_ref().map_or(1.0, |r| r.factor(d));
        Ok(MatsubaraSum {
            value: prefactor * doubled * factor,
            terms: 2 * n_cut,
            doubling_change: change,
        })
    }
}

/// Reflection coefficients `(r_TM, r_TE)` at reduced wavevector `y ≥ y_n`.
#[derive(Clone, Copy)]
enum Reflection {
    Static(StaticResponse, f64),
    Dynamic { eps: f64, yn2: f64 },
}

impl Reflection {
    fn new(m: &dyn Permittivity, n: usize, yn: f64, d: f64) -> Self {
        if n == 0 {
            // Plasma TE coefficient uses Ω in units of 1/(2d).
            let scale = 2.0 * d / HBAR_C_EV_M;
            Reflection::Static(m.static_response(), scale)
        } else {
            Reflection::Dynamic {
                eps: m.epsilon(yn / (2.0 * d) * HBAR_C_EV_M),
                yn2: yn * yn,
            }
        }
    }

    fn at(&self, y: f64) -> (f64, f64) {
        match *self {
            Reflection::Static(StaticResponse::Conductor, _) => (1.0, 0.0),
            Reflection::Static(StaticResponse::Dielectric { eps0 }, _) => ((eps0 - 1.0) / (eps0 + 1.0), 0.0),
            Reflection::Static(StaticResponse::Plasma { omega_p }, scale) => {
                let w = omega_p * scale;
                let s = (y * y + w * w).sqrt();
                (1.0, -(w * w) / ((y + s) * (y + s)))
            }
            Reflection::Dynamic { eps, yn2 } => {
                let de = eps - 1.0;
                let s = (y * y + de * yn2).sqrt();
                let tm = de * ((eps + 1.0) * y * y - yn2) / ((eps * y + s) * (eps * y + s));
                let te = -de * yn2 / ((y + s) * (y + s));
                (tm, te)
            }
        }
    }
}

fn matsubara_term(m1: &dyn Permittivity, m2: &dyn Permittivity, n: usize, step: f64, d: f64, q: Quantity) -> Result<f64> {
    let yn = step * n as f64;
    let r1 = Reflection::new(m1, n, yn, d);
    let r2 = Reflection::new(m2, n, yn, d);
    if yn > 700.0 {
        return Ok(0.0);
    }
    // The integrand is computed times e^{y_n} so deep terms do not underflow.
    let integrand = |y: f64| {
        let (a_tm, a_te) = r1.at(y);
        let (b_tm, b_te) = r2.at(y);
        let e = (-y).exp();
        let es = (yn - y).exp();
        let (x_tm, x_te) = (a_tm * b_tm * e, a_te * b_te * e);
        match q {
            Quantity::Pressure => {
                let inner = if n == 0 && a_tm * b_tm == 1.0 {
                    // r₁r₂ = 1: e^{−y}/(1−e^{−y}) = 1/expm1(y) stays finite as y → 0.
                    1.0 / y.exp_m1()
                } else {
                    a_tm * b_tm * es / (1.0 - x_tm)
                };
                y * y * (inner + a_te * b_te * es / (1.0 - x_te))
            }
            Quantity::Energy => {
                let tm = if n == 0 && a_tm * b_tm == 1.0 { y.exp_m1().ln() - y } else { (-x_tm).ln_1p() * yn.exp() };
                y * (tm + (-x_te).ln_1p() * yn.exp())
            }
        }
    };
    let breaks: Vec<f64> = [0.0, 0.5, 2.0, 8.0, 25.0, 60.0, 100.0].iter().map(|b| yn + b).collect();
    let value = Quadrature::new(1e-11).integrate_with_breaks(integrand, &breaks)?.value;
    Ok(value * (-yn).exp())
}

/// Plane–plane Lifshitz pressure in Pa (negative for attraction).
pub fn lifshitz_pressure_pp(m1: &dyn Permittivity, m2: &dyn Permittivity, d: f64, temperature: f64) -> Result<f64> {
    Ok(LifshitzCalculator::new(temperature)?.pressure(m1, m2, d)?.value)
}

/// Plane–plane Lifshitz energy per area in J/m² (negative for attraction).
pub fn lifshitz_energy_pp(m1: &dyn Permittivity, m2: &dyn Permittivity, d: f64, temperature: f64) -> Result<f64> {
    Ok(LifshitzCalculator::new(temperature)?.energy(m1, m2, d)?.value)
}
