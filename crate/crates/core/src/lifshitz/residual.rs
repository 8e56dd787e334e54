//! Measurement datasets and measured-minus-predicted residuals.
//!
//! Values use the attractive-positive convention: an attractive pressure,
//! force or force gradient is a positive number.

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use super::calculator::LifshitzCalculator;
use super::permittivity::Permittivity;
use crate::error::{Error, Result};
use crate::pressure::{pfa_force, pfa_gradient, SpherePlaneGeometry};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Observable {
    /// Plane–plane pressure in Pa.
    PressurePp,
    /// Sphere–plane force in N.
    ForceSp,
    /// Sphere–plane force gradient in N/m.
    GradientSp,
}

impl Observable {
    pub fn name(self) -> &'static str {
        match self {
            Observable::PressurePp => "pressure_pp",
            Observable::ForceSp => "force_sp",
            Observable::GradientSp => "gradient_sp",
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            Observable::PressurePp => "Pa",
            Observable::ForceSp => "N",
            Observable::GradientSp => "N_per_m",
        }
    }

    pub fn needs_radius(self) -> bool {
        self != Observable::PressurePp
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Observable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "pressure_pp" => Ok(Observable::PressurePp),
            "force_sp" => Ok(Observable::ForceSp),
            "gradient_sp" => Ok(Observable::GradientSp),
            other => Err(Error::invalid(
                "observable",
                format!("unknown observable `{other}` (expected pressure_pp, force_sp or gradient_sp)"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DataPoint {
    /// Meters.
    pub distance: f64,
    pub value: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualDataset {
    pub observable: Observable,
    /// Sphere radius in meters for sphere–plane observables.
    pub radius: Option<f64>,
    points: Vec<DataPoint>,
}

impl ResidualDataset {
    /// Distances must be positive and strictly increasing; every `sigma > 0`.
    pub fn new(observable: Observable, radius: Option<f64>, points: Vec<DataPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("dataset", "no data points"));
        }
        for (i, p) in points.iter().enumerate() {
            if !(p.distance > 0.0 && p.distance.is_finite()) {
                return Err(Error::invalid("dataset", format!("point {i}: distance must be positive")));
            }
            if !p.value.is_finite() {
                return Err(Error::invalid("dataset", format!("point {i}: value is not finite")));
            }
            if !(p.sigma > 0.0 && p.sigma.is_finite()) {
                return Err(Error::invalid("dataset", format!("point {i}: sigma must be positive")));
            }
        }
        if let Some(i) = points.windows(2).position(|w| w[1].distance <= w[0].distance) {
            return Err(Error::invalid(
                "dataset",
                format!("distances must increase strictly (points {} and {})", i, i + 1),
            ));
        }
        if let Some(r) = radius {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::invalid("radius", format!("must be positive, got {r:e} m")));
            }
        }
        Ok(ResidualDataset {
            observable,
            radius,
            points,
        })
    }

    /// Parses `D_nm, value, sigma` rows. Header comments `# observable: <name>`
    /// (required) and `# radius_um: <R>` are recognised; other `#` lines and a
    /// non-numeric first row are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut observable = None;
        let mut radius = None;
        let mut points = Vec::new();
        let mut last_line = 0;
        for (n, raw) in text.lines().enumerate() {
            let line_no = n + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                if let Some((key, value)) = comment.split_once(':') {
                    let parse_err = |reason: String| Error::Parse { line: line_no, reason };
                    match key.trim().to_ascii_lowercase().as_str() {
                        "observable" => {
                            observable = Some(value.parse::<Observable>().map_err(|e| parse_err(e.to_string()))?)
                        }
                        "radius_um" => {
                            let r: f64 = value
                                .trim()
                                .parse()
                                .map_err(|_| parse_err(format!("radius `{}` is not a number", value.trim())))?;
                            radius = Some(r / 1e6);
                        }
                        _ => {}
                    }
                }
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let numbers: std::result::Result<Vec<f64>, _> = fields.iter().map(|f| f.parse::<f64>()).collect();
            let numbers = match numbers {
                Ok(v) => v,
                Err(_) if points.is_empty() && fields.first().is_some_and(|f| f.parse::<f64>().is_err()) => continue,
                Err(_) => {
                    return Err(Error::Parse {
                        line: line_no,
                        reason: format!("expected numbers `D_nm, value, sigma`, got `{line}`"),
                    })
                }
            };
            if numbers.len() != 3 {
                return Err(Error::Parse {
                    line: line_no,
                    reason: format!("expected 3 columns, found {}", numbers.len()),
                });
            }
            points.push(DataPoint {
                distance: numbers[0] / 1e9,
                value: numbers[1],
                sigma: numbers[2],
            });
            last_line = line_no;
        }
        let observable = observable.ok_or_else(|| Error::Parse {
            line: 0,
            reason: "missing `# observable: pressure_pp|force_sp|gradient_sp` line".into(),
        })?;
        Self::new(observable, radius, points).map_err(|e| match e {
            Error::Invalid { reason, .. } => Error::Parse { line: last_line, reason },
            other => other,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn points(&self) -> &[DataPoint] {
        &self.points
    }

    pub fn distances(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.distance).collect()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Same distances and sigmas with new values.
    pub fn with_values(&self, values: &[f64]) -> Result<Self> {
        if values.len() != self.points.len() {
            return Err(Error::invalid("values", format!("expected {}, got {}", self.points.len(), values.len())));
        }
        let points = self
            .points
            .iter()
            .zip(values)
            .map(|(p, &value)| DataPoint { value, ..*p })
            .collect();
        Self::new(self.observable, self.radius, points)
    }

    /// `D_nm, value, sigma` CSV with the observable and radius header lines.
    pub fn to_csv(&self) -> String {
        let mut out = format!("# observable: {}\n", self.observable);
        if let Some(r) = self.radius {
            out.push_str(&format!("# radius_um: {}\n", r * 1e6));
        }
        let unit = self.observable.unit();
        out.push_str(&format!("D_nm,value_{unit},sigma_{unit}\n"));
        for p in &self.points {
            out.push_str(&format!("{:.10e},{:.12e},{:.12e}\n", p.distance * 1e9, p.value, p.sigma));
        }
        out
    }
}

/// A prediction of the observable as a function of distance (meters).
pub trait Curve: Send + Sync {
    fn eval(&self, distance: f64) -> Result<f64>;

    /// Closed interval of distances where `eval` is defined.
    fn valid_range(&self) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }
}

impl<F: Fn(f64) -> Result<f64> + Send + Sync> Curve for F {
    fn eval(&self, distance: f64) -> Result<f64> {
        self(distance)
    }
}

/// Piecewise interpolation through `(distance, value)` samples: log–log when all
/// values share a sign, linear otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedCurve {
    points: Vec<(f64, f64)>,
    log: bool,
}

impl TabulatedCurve {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::invalid("curve", "needs at least two points"));
        }
        if points.iter().any(|p| !(p.0 > 0.0 && p.0.is_finite() && p.1.is_finite())) {
            return Err(Error::invalid("curve", "distances must be positive and values finite"));
        }
        if points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::invalid("curve", "distances must increase strictly"));
        }
        let log = points.iter().all(|p| p.1 > 0.0) || points.iter().all(|p| p.1 < 0.0);
        Ok(TabulatedCurve { points, log })
    }
}

impl Curve for TabulatedCurve {
    fn eval(&self, d: f64) -> Result<f64> {
        let (lo, hi) = self.valid_range();
        if !(d >= lo && d <= hi) {
            return Err(Error::OutOfRange(vec![(0, d)]));
        }
        let p = &self.points;
        let i = (p.partition_point(|q| q.0 <= d).max(1) - 1).min(p.len() - 2);
        let (a, b) = (p[i], p[i + 1]);
        if self.log {
            let t = (d / a.0).ln() / (b.0 / a.0).ln();
            Ok(a.1.signum() * ((a.1.abs().ln()) + t * (b.1.abs() / a.1.abs()).ln()).exp())
        } else {
            let t = (d - a.0) / (b.0 - a.0);
            Ok(a.1 + t * (b.1 - a.1))
        }
    }

    fn valid_range(&self) -> (f64, f64) {
        (self.points[0].0, self.points[self.points.len() - 1].0)
    }
}

/// Lifshitz prediction of an observable, attractive positive.
#[derive(Debug, Clone)]
pub struct LifshitzCurve {
    pub m1: Arc<dyn Permittivity>,
    pub m2: Arc<dyn Permittivity>,
    pub calculator: LifshitzCalculator,
    pub observable: Observable,
    pub radius: Option<f64>,
}

impl LifshitzCurve {
    pub fn new(
        m1: Arc<dyn Permittivity>,
        m2: Arc<dyn Permittivity>,
        calculator: LifshitzCalculator,
        observable: Observable,
        radius: Option<f64>,
    ) -> Result<Self> {
        if observable.needs_radius() && radius.is_none() {
            return Err(Error::invalid("radius", format!("{observable} needs a sphere radius")));
        }
        Ok(LifshitzCurve {
            m1,
            m2,
            calculator,
            observable,
            radius,
        })
    }
}

impl Curve for LifshitzCurve {
    fn eval(&self, d: f64) -> Result<f64> {
        let (m1, m2) = (self.m1.as_ref(), self.m2.as_ref());
        match (self.observable, self.radius) {
            (Observable::PressurePp, _) => Ok(-self.calculator.pressure(m1, m2, d)?.value),
            (Observable::GradientSp, Some(r)) => {
                let g = SpherePlaneGeometry::new(r, d)?;
                Ok(pfa_gradient(&g, -self.calculator.pressure(m1, m2, d)?.value))
            }
            (Observable::ForceSp, Some(r)) => {
                let g = SpherePlaneGeometry::new(r, d)?;
                Ok(pfa_force(&g, -self.calculator.energy(m1, m2, d)?.value))
            }
            (o, None) => Err(Error::invalid("radius", format!("{o} needs a sphere radius"))),
        }
    }
}

/// Pointwise `measured − predicted`, sigmas unchanged. Every out-of-range
/// distance is listed in the error.
pub fn residual(dataset: &ResidualDataset, prediction: &dyn Curve) -> Result<ResidualDataset> {
    let (lo, hi) = prediction.valid_range();
    let outside: Vec<(usize, f64)> = dataset
        .points()
        .iter()
        .enumerate()
        .filter(|(_, p)| !(p.distance >= lo && p.distance <= hi))
        .map(|(i, p)| (i, p.distance))
        .collect();
    if !outside.is_empty() {
        return Err(Error::OutOfRange(outside));
    }
    let predicted = evaluate_curve(prediction, &dataset.distances())?;
    let values: Vec<f64> = dataset.points().iter().zip(&predicted).map(|(p, q)| p.value - q).collect();
    dataset.with_values(&values)
}

/// Evaluates a curve at every distance in parallel.
pub fn evaluate_curve(curve: &dyn Curve, distances: &[f64]) -> Result<Vec<f64>> {
    use rayon::prelude::*;
    distances.par_iter().map(|&d| curve.eval(d)).collect()
}
