//! Special functions, quadrature and the Hankel transform pair.

pub mod bessel;
pub mod constants;
pub mod hankel;
pub mod quadrature;

pub use bessel::{bessel_j, j0, j1};
pub use hankel::{hankel_forward, hankel_inverse, RadialFunction};
pub use quadrature::{integrate_semi_infinite, Estimate, Quadrature};
