//! Lifshitz Casimir pressure between real metals and residual signals.

mod calculator;
pub mod optical;
pub mod permittivity;
mod registry;
pub mod residual;

pub use calculator::{
    lifshitz_energy_pp, lifshitz_pressure_pp, LifshitzCalculator, MatsubaraSum, RoughnessFactor, TabulatedRoughness,
};
pub use optical::{OpticalDataTable, OpticalRow};
pub use permittivity::{
    epsilon_imaginary_axis, Drude, DrudeExtrapolated, GeneralizedPlasma, Oscillator, Permittivity, StaticResponse,
    PLACEHOLDER_GOLD_OSCILLATORS,
};
pub use registry::{permittivity_models, PermittivityRegistry};
pub use residual::{
    evaluate_curve, residual, Curve, DataPoint, LifshitzCurve, Observable, ResidualDataset, TabulatedCurve,
};
