//! Least-squares estimation of patch parameters (ℓ_min, ℓ_max, V_rms) against
//! a residual dataset.
//!
//! The model is `V_rms² · g(D; ℓ_min, ℓ_max)` with `g` the unit-voltage patch
//! observable of two identical, uncorrelated plates. The search runs over
//! the logarithms of the free parameters with Nelder–Mead from scrambled
//! Halton starts; restarts run in parallel and the best one wins.

mod model;
mod simplex;

use std::fmt::{self, Write as _};
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lifshitz::{Observable, ResidualDataset};

pub use model::{
    patch_families, unit_observable, PatchCache, PatchFamily, PatchFamilyRegistry, QuasiLocalUniform, SharpCutoffBand,
    CACHE_TOLERANCE,
};
pub use simplex::{nelder_mead, scrambled_halton, SimplexOptions, SimplexOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FitParameter {
    LMin,
    LMax,
    VRms,
}

impl FitParameter {
    pub const ALL: [FitParameter; 3] = [FitParameter::LMin, FitParameter::LMax, FitParameter::VRms];

    pub fn name(self) -> &'static str {
        match self {
            FitParameter::LMin => "l_min",
            FitParameter::LMax => "l_max",
            FitParameter::VRms => "v_rms",
        }
    }

    /// Unit used in reports, with its scale from SI.
    pub fn display_unit(self) -> (&'static str, f64) {
        match self {
            FitParameter::LMin | FitParameter::LMax => ("nm", 1e9),
            FitParameter::VRms => ("mV", 1e3),
        }
    }
}

impl fmt::Display for FitParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One parameter: its value when fixed, and its search bounds when free (SI units).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParameterSpec {
    pub value: f64,
    pub free: bool,
    pub lower: f64,
    pub upper: f64,
}

impl ParameterSpec {
    pub fn fixed(value: f64) -> Self {
        ParameterSpec {
            value,
            free: false,
            lower: value,
            upper: value,
        }
    }

    /// Free within `[lower, upper]`; `value` is the geometric midpoint.
    pub fn free(lower: f64, upper: f64) -> Self {
        ParameterSpec {
            value: (lower * upper).sqrt(),
            free: true,
            lower,
            upper,
        }
    }
}

/// Parameter values in SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatchParameters {
    pub l_min: f64,
    pub l_max: f64,
    pub v_rms: f64,
}

impl PatchParameters {
    pub fn get(&self, p: FitParameter) -> f64 {
        match p {
            FitParameter::LMin => self.l_min,
            FitParameter::LMax => self.l_max,
            FitParameter::VRms => self.v_rms,
        }
    }

    fn set(&mut self, p: FitParameter, v: f64) {
        match p {
            FitParameter::LMin => self.l_min = v,
            FitParameter::LMax => self.l_max = v,
            FitParameter::VRms => self.v_rms = v,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FitSpec {
    pub observable: Observable,
    /// Sphere radius for sphere–plane observables; falls back to the dataset's.
    pub radius: Option<f64>,
    pub family: Arc<dyn PatchFamily>,
    pub l_min: ParameterSpec,
    pub l_max: ParameterSpec,
    pub v_rms: ParameterSpec,
    pub restarts: usize,
    pub seed: u64,
    pub simplex: SimplexOptions,
    /// Tabulate the unit observable on `(D, ℓ_max)`; applies when ℓ_min is fixed.
    pub use_cache: bool,
}

impl FitSpec {
    /// Quasi-local model with ℓ_min fixed and ℓ_max, V_rms free.
    pub fn new(observable: Observable, l_min: f64, l_max_bounds: (f64, f64), v_rms_bounds: (f64, f64)) -> Self {
        FitSpec {
            observable,
            radius: None,
            family: Arc::new(QuasiLocalUniform),
            l_min: ParameterSpec::fixed(l_min),
            l_max: ParameterSpec::free(l_max_bounds.0, l_max_bounds.1),
            v_rms: ParameterSpec::free(v_rms_bounds.0, v_rms_bounds.1),
            restarts: 8,
            seed: 0,
            simplex: SimplexOptions::default(),
            use_cache: true,
        }
    }

    pub fn parameter(&self, p: FitParameter) -> &ParameterSpec {
        match p {
            FitParameter::LMin => &self.l_min,
            FitParameter::LMax => &self.l_max,
            FitParameter::VRms => &self.v_rms,
        }
    }

    pub fn free_parameters(&self) -> Vec<FitParameter> {
        FitParameter::ALL.into_iter().filter(|&p| self.parameter(p).free).collect()
    }

    fn base(&self) -> PatchParameters {
        PatchParameters {
            l_min: self.l_min.value,
            l_max: self.l_max.value,
            v_rms: self.v_rms.value,
        }
    }

    fn validate(&self) -> Result<()> {
        for p in FitParameter::ALL {
            let s = self.parameter(p);
            let ok = if s.free {
                s.lower > 0.0 && s.upper > s.lower && s.upper.is_finite()
            } else {
                s.value >= 0.0 && s.value.is_finite() && (p == FitParameter::VRms || s.value > 0.0)
            };
            if !ok {
                return Err(Error::invalid(
                    p.name(),
                    "bounds must be finite, positive and increasing (fixed values finite and positive)",
                ));
            }
        }
        let l_min_lo = if self.l_min.free { self.l_min.lower } else { self.l_min.value };
        let l_max_hi = if self.l_max.free { self.l_max.upper } else { self.l_max.value };
        if l_min_lo >= l_max_hi {
            return Err(Error::invalid("l_min", "no l_min <= l_max point inside the bounds"));
        }
        if self.restarts == 0 {
            return Err(Error::invalid("restarts", "need at least one restart"));
        }
        Ok(())
    }
}

/// Radius for the observable: the spec's, else the dataset's; both must agree.
fn resolve_radius(dataset: &ResidualDataset, spec: &FitSpec) -> Result<Option<f64>> {
    if dataset.observable != spec.observable {
        return Err(Error::invalid(
            "observable",
            format!("dataset holds {} but the fit expects {}", dataset.observable, spec.observable),
        ));
    }
    let radius = match (spec.radius, dataset.radius) {
        (Some(a), Some(b)) if (a / b - 1.0).abs() > 1e-9 => {
            return Err(Error::invalid("radius", format!("fit radius {a:e} m differs from dataset radius {b:e} m")))
        }
        (a, b) => a.or(b),
    };
    if spec.observable.needs_radius() && radius.is_none() {
        return Err(Error::invalid("radius", format!("{} needs a sphere radius", spec.observable)));
    }
    Ok(radius)
}

/// Patch model values at every dataset distance.
pub fn model_values(dataset: &ResidualDataset, params: &PatchParameters, spec: &FitSpec) -> Result<Vec<f64>> {
    let radius = resolve_radius(dataset, spec)?;
    let v2 = params.v_rms * params.v_rms;
    dataset
        .points()
        .par_iter()
        .map(|p| Ok(v2 * unit_observable(spec.family.as_ref(), spec.observable, radius, params.l_min, params.l_max, p.distance)?))
        .collect()
}

/// `Σ_i [(residual_i − model_i)/σ_i]²`.
pub fn chi_squared(dataset: &ResidualDataset, params: &PatchParameters, spec: &FitSpec) -> Result<f64> {
    let model = model_values(dataset, params, spec)?;
    Ok(weighted_sum(dataset, &model))
}

/// [`chi_squared`] divided by `N − (number of free parameters)`.
pub fn reduced_chi_squared(dataset: &ResidualDataset, params: &PatchParameters, spec: &FitSpec) -> Result<f64> {
    let dof = degrees_of_freedom(dataset, spec)?;
    Ok(chi_squared(dataset, params, spec)? / dof as f64)
}

fn degrees_of_freedom(dataset: &ResidualDataset, spec: &FitSpec) -> Result<usize> {
    let free = spec.free_parameters().len();
    if dataset.len() <= free {
        return Err(Error::invalid(
            "dataset",
            format!("{} points cannot constrain {free} free parameters", dataset.len()),
        ));
    }
    Ok(dataset.len() - free)
}

fn weighted_sum(dataset: &ResidualDataset, model: &[f64]) -> f64 {
    dataset
        .points()
        .iter()
        .zip(model)
        .map(|(p, m)| ((p.value - m) / p.sigma).powi(2))
        .sum()
}

/// Relative uncertainty above which a parameter is reported as weakly constrained.
pub const WEAK_RELATIVE_UNCERTAINTY: f64 = 0.5;
/// Curvature ratio (softest over stiffest) below which the softest direction
/// counts as degenerate, provided its log-space standard deviation also
/// exceeds [`DEGENERATE_SPREAD`].
const DEGENERATE_CURVATURE: f64 = 1e-2;
const DEGENERATE_SPREAD: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub params: PatchParameters,
    pub free: Vec<FitParameter>,
    pub chi_squared: f64,
    pub reduced_chi_squared: f64,
    pub dof: usize,
    /// Covariance of the free parameters in SI units, ordered as `free`.
    pub covariance: Vec<Vec<f64>>,
    pub uncertainties: Vec<f64>,
    /// Simplex iterations summed over restarts.
    pub iterations: usize,
    pub converged: bool,
    pub restarts_converged: usize,
    /// Free parameters whose relative uncertainty exceeds
    /// [`WEAK_RELATIVE_UNCERTAINTY`] or that dominate a near-flat direction.
    pub weakly_constrained: Vec<FitParameter>,
    /// Softest direction of the χ² surface in log-parameter space.
    pub softest_direction: Vec<f64>,
    /// Free parameters that ended within 0.1% (in log space) of a bound.
    pub at_bound: Vec<FitParameter>,
    /// Best χ² after each iteration of the winning restart.
    pub history: Vec<f64>,
    pub cache_error: Option<f64>,
}

impl FitResult {
    pub fn uncertainty(&self, p: FitParameter) -> Option<f64> {
        self.free.iter().position(|&q| q == p).map(|i| self.uncertainties[i])
    }

    pub fn is_degenerate(&self) -> bool {
        !self.weakly_constrained.is_empty()
    }

    /// Text report with parameters, uncertainties, reduced χ² and the
    /// residual-after-fit table.
    pub fn report(&self, dataset: &ResidualDataset, spec: &FitSpec) -> Result<String> {
        let model = model_values(dataset, &self.params, spec)?;
        let mut out = String::new();
        let _ = writeln!(out, "model = {}", spec.family.name());
        let _ = writeln!(out, "observable = {}", spec.observable);
        let _ = writeln!(out, "points = {}", dataset.len());
        let _ = writeln!(out, "converged = {} ({} of {} restarts)", self.converged, self.restarts_converged, spec.restarts);
        for p in FitParameter::ALL {
            let (unit, scale) = p.display_unit();
            let value = self.params.get(p) * scale;
            match self.uncertainty(p) {
                Some(s) => {
                    let mut flags = String::new();
                    if self.weakly_constrained.contains(&p) {
                        flags.push_str("  [weakly constrained]");
                    }
                    if self.at_bound.contains(&p) {
                        flags.push_str("  [at bound]");
                    }
                    let _ = writeln!(out, "{p}_{} = {value:.6} +/- {:.6}{flags}", unit.to_lowercase(), s * scale);
                }
                None => {
                    let _ = writeln!(out, "{p}_{} = {value:.6} (fixed)", unit.to_lowercase());
                }
            }
        }
        let _ = writeln!(out, "chi_squared = {:.6}", self.chi_squared);
        let _ = writeln!(out, "reduced_chi_squared = {:.6} (dof = {})", self.reduced_chi_squared, self.dof);
        if self.is_degenerate() {
            let names: Vec<&str> = self.weakly_constrained.iter().map(|p| p.name()).collect();
            let _ = writeln!(
                out,
                "WARNING: degenerate fit, the data barely constrain {}; softest log-direction = {:?}",
                names.join(", "),
                self.softest_direction.iter().map(|v| (v * 1e4).round() / 1e4).collect::<Vec<_>>()
            );
        }
        if let Some(e) = self.cache_error {
            let _ = writeln!(out, "cache_max_relative_error = {e:.2e}");
        }
        let _ = writeln!(out, "covariance ({}):", self.free.iter().map(|p| p.name()).collect::<Vec<_>>().join(", "));
        for row in &self.covariance {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.6e}")).collect();
            let _ = writeln!(out, "  {}", cells.join("  "));
        }
        out.push('\n');
        out.push_str(&residual_table(dataset, &model));
        Ok(out)
    }
}

/// CSV of `D_nm, residual, sigma, model, residual_after_fit` in the dataset's unit.
pub fn residual_table(dataset: &ResidualDataset, model: &[f64]) -> String {
    let unit = dataset.observable.unit();
    let mut out = format!(
        "D_nm,residual_{unit},sigma_{unit},patch_model_{unit},residual_after_fit_{unit}\n",
        unit = unit.replace('/', "_per_")
    );
    for (p, m) in dataset.points().iter().zip(model) {
        let _ = writeln!(
            out,
            "{:.10e},{:.12e},{:.12e},{:.12e},{:.12e}",
            p.distance * 1e9,
            p.value,
            p.sigma,
            m,
            p.value - m
        );
    }
    out
}

enum Evaluator {
    Direct,
    Cached(PatchCache),
}

struct Problem<'a> {
    dataset: &'a ResidualDataset,
    spec: &'a FitSpec,
    free: Vec<FitParameter>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    evaluator: Evaluator,
    radius: Option<f64>,
}

impl Problem<'_> {
    fn params(&self, theta: &[f64]) -> PatchParameters {
        let mut p = self.spec.base();
        for (&q, &t) in self.free.iter().zip(theta) {
            p.set(q, t.exp());
        }
        p
    }

    fn feasible(&self, theta: &[f64]) -> bool {
        theta.iter().zip(self.lower.iter().zip(&self.upper)).all(|(t, (lo, hi))| t >= lo && t <= hi) && {
            let p = self.params(theta);
            p.l_min < p.l_max
        }
    }

    fn unit_values(&self, p: &PatchParameters, exact: bool) -> Result<Vec<f64>> {
        let points = self.dataset.points();
        match (&self.evaluator, exact) {
            (Evaluator::Cached(c), false) => points.iter().map(|q| c.interpolate(q.distance, p.l_max)).collect(),
            _ => points
                .par_iter()
                .map(|q| {
                    unit_observable(self.spec.family.as_ref(), self.spec.observable, self.radius, p.l_min, p.l_max, q.distance)
                })
                .collect(),
        }
    }

    fn chi2(&self, theta: &[f64], exact: bool) -> f64 {
        if !self.feasible(theta) {
            return f64::INFINITY;
        }
        let p = self.params(theta);
        match self.unit_values(&p, exact) {
            Ok(g) => {
                let v2 = p.v_rms * p.v_rms;
                let model: Vec<f64> = g.iter().map(|x| v2 * x).collect();
                weighted_sum(self.dataset, &model)
            }
            Err(_) => f64::INFINITY,
        }
    }
}

/// Builds the interpolation cache the fit would use, for reuse across datasets
/// whose distances lie inside `d_range`.
pub fn build_cache(spec: &FitSpec, radius: Option<f64>, d_range: (f64, f64)) -> Result<PatchCache> {
    spec.validate()?;
    if spec.l_min.free {
        return Err(Error::invalid("cache", "the (D, l_max) cache needs a fixed l_min"));
    }
    let l_range = if spec.l_max.free { (spec.l_max.lower, spec.l_max.upper) } else { (spec.l_max.value * 0.99, spec.l_max.value * 1.01) };
    PatchCache::build(spec.family.as_ref(), spec.observable, radius, spec.l_min.value, d_range, l_range)
}

/// Fits `spec`'s free parameters to `dataset`.
pub fn fit(dataset: &ResidualDataset, spec: &FitSpec) -> Result<FitResult> {
    fit_with_cache(dataset, spec, None)
}

/// As [`fit`], reusing a cache from [`build_cache`] when it matches the spec.
pub fn fit_with_cache(dataset: &ResidualDataset, spec: &FitSpec, cache: Option<&PatchCache>) -> Result<FitResult> {
    spec.validate()?;
    let radius = resolve_radius(dataset, spec)?;
    let dof = degrees_of_freedom(dataset, spec)?;
    let free = spec.free_parameters();
    if free.is_empty() {
        return Err(Error::invalid("fit", "no free parameters"));
    }
    let ds = dataset.distances();
    let d_range = (ds.iter().copied().fold(f64::INFINITY, f64::min), ds.iter().copied().fold(0.0, f64::max));
    let evaluator = if spec.use_cache && !spec.l_min.free {
        let reusable = cache.filter(|c| {
            c.family == spec.family.name()
                && c.observable == spec.observable
                && c.radius == radius
                && c.l_min == spec.l_min.value
                && c.covers(d_range.0, spec.l_max.lower)
                && c.covers(d_range.1, spec.l_max.upper)
        });
        match reusable {
            Some(c) => Evaluator::Cached(c.clone()),
            None => Evaluator::Cached(build_cache(spec, radius, d_range)?),
        }
    } else {
        Evaluator::Direct
    };
    let cache_error = match &evaluator {
        Evaluator::Cached(c) => Some(c.max_error),
        Evaluator::Direct => None,
    };
    let problem = Problem {
        dataset,
        spec,
        lower: free.iter().map(|&p| spec.parameter(p).lower.ln()).collect(),
        upper: free.iter().map(|&p| spec.parameter(p).upper.ln()).collect(),
        free,
        evaluator,
        radius,
    };
    let n = problem.free.len();

    let starts = scrambled_halton(n, spec.restarts, spec.seed);
    let outcomes: Vec<SimplexOutcome> = starts
        .par_iter()
        .map(|u| {
            let mut theta: Vec<f64> = (0..n).map(|i| problem.lower[i] + u[i] * (problem.upper[i] - problem.lower[i])).collect();
            // Keep ℓ_min < ℓ_max at the start point.
            if !problem.feasible(&theta) {
                for (i, &p) in problem.free.iter().enumerate() {
                    let mid = 0.5 * (problem.lower[i] + problem.upper[i]);
                    theta[i] = match p {
                        FitParameter::LMin => problem.lower[i].min(mid),
                        FitParameter::LMax => problem.upper[i].max(mid),
                        FitParameter::VRms => theta[i],
                    };
                }
            }
            let step: Vec<f64> = (0..n)
                .map(|i| {
                    let s = 0.1 * (problem.upper[i] - problem.lower[i]);
                    // Step inward so the initial simplex stays feasible.
                    if theta[i] + s > problem.upper[i] {
                        -s
                    } else {
                        s
                    }
                })
                .collect();
            nelder_mead(|t| problem.chi2(t, false), &theta, &step, &spec.simplex)
        })
        .collect();
    let iterations = outcomes.iter().map(|o| o.iterations).sum();
    let best = outcomes
        .iter()
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .expect("at least one restart");
    let restarts_converged = outcomes.iter().filter(|o| o.converged).count();
    if !best.value.is_finite() {
        return Err(Error::invalid("fit", "the model could not be evaluated anywhere inside the bounds"));
    }
    let theta = best.x.clone();
    let params = problem.params(&theta);
    let chi2 = problem.chi2(&theta, true);

    let hessian = log_hessian(&problem, &theta);
    let (cov_log, softest, weak_direction) = covariance_from_hessian(&hessian);
    let scale: Vec<f64> = theta.iter().map(|t| t.exp()).collect();
    let covariance: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| cov_log[(i, j)] * scale[i] * scale[j]).collect()).collect();
    let uncertainties: Vec<f64> = (0..n).map(|i| covariance[i][i].sqrt()).collect();
    let mut weakly_constrained = Vec::new();
    for (i, &p) in problem.free.iter().enumerate() {
        let rel = cov_log[(i, i)].sqrt();
        if rel > WEAK_RELATIVE_UNCERTAINTY || (weak_direction && softest[i].abs() > 0.5) {
            weakly_constrained.push(p);
        }
    }
    let at_bound: Vec<FitParameter> = problem
        .free
        .iter()
        .enumerate()
        .filter(|&(i, _)| {
            let tol = 1e-3 * (problem.upper[i] - problem.lower[i]);
            theta[i] - problem.lower[i] < tol || problem.upper[i] - theta[i] < tol
        })
        .map(|(_, &p)| p)
        .collect();

    Ok(FitResult {
        params,
        free: problem.free.clone(),
        chi_squared: chi2,
        reduced_chi_squared: chi2 / dof as f64,
        dof,
        covariance,
        uncertainties,
        iterations,
        converged: best.converged,
        restarts_converged,
        weakly_constrained,
        softest_direction: softest,
        at_bound,
        history: best.history.clone(),
        cache_error,
    })
}

/// Finite-difference Hessian of the exact χ² in log-parameter space.
/// Steps that leave the bounds are mirrored to one-sided differences.
fn log_hessian(problem: &Problem<'_>, theta: &[f64]) -> DMatrix<f64> {
    let n = theta.len();
    let h = 1e-3;
    let f = |t: &[f64]| {
        let p = problem.params(t);
        match problem.unit_values(&p, true) {
            Ok(g) => {
                let v2 = p.v_rms * p.v_rms;
                let model: Vec<f64> = g.iter().map(|x| v2 * x).collect();
                weighted_sum(problem.dataset, &model)
            }
            Err(_) => f64::NAN,
        }
    };
    let shifted = |d: &[(usize, f64)]| {
        let mut t = theta.to_vec();
        for &(i, s) in d {
            t[i] += s;
        }
        f(&t)
    };
    let f0 = f(theta);
    let mut hess = DMatrix::zeros(n, n);
    for i in 0..n {
        hess[(i, i)] = (shifted(&[(i, h)]) - 2.0 * f0 + shifted(&[(i, -h)])) / (h * h);
        for j in 0..i {
            let v = (shifted(&[(i, h), (j, h)]) - shifted(&[(i, h), (j, -h)]) - shifted(&[(i, -h), (j, h)])
                + shifted(&[(i, -h), (j, -h)]))
                / (4.0 * h * h);
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    hess
}

/// `cov = 2 H⁻¹` with eigenvalues floored so the result is symmetric positive
/// semi-definite. Returns the covariance, the softest eigenvector and whether
/// that direction is degenerate.
fn covariance_from_hessian(h: &DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>, bool) {
    let n = h.nrows();
    let h = h.map(|v| if v.is_finite() { v } else { 0.0 });
    let eig = SymmetricEigen::new(h);
    let lmax = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    let floor = (lmax * 1e-14).max(1e-300);
    let (soft, lmin) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, &v)| (i, v))
        .unwrap();
    let softest: Vec<f64> = (0..n).map(|k| eig.eigenvectors[(k, soft)]).collect();
    let degenerate =
        lmax <= 0.0 || (lmin <= DEGENERATE_CURVATURE * lmax && (2.0 / lmin.max(floor)).sqrt() > DEGENERATE_SPREAD);
    let inv = DMatrix::from_diagonal(&eig.eigenvalues.map(|v| 2.0 / v.max(floor)));
    let cov = &eig.eigenvectors * inv * eig.eigenvectors.transpose();
    let cov = (&cov + cov.transpose()) * 0.5;
    (cov, softest, degenerate)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn covariance_is_symmetric_psd_even_for_flat_directions() {
        let h = DMatrix::from_row_slice(2, 2, &[4.0, 2.0, 2.0, 1.0]);
        let (cov, soft, degenerate) = covariance_from_hessian(&h);
        assert!(degenerate);
        assert!((cov[(0, 1)] - cov[(1, 0)]).abs() <= 1e-12 * cov[(0, 1)].abs());
        let eig = SymmetricEigen::new(cov);
        assert!(eig.eigenvalues.iter().all(|&v| v >= 0.0));
        // Flat direction of [[4,2],[2,1]] is (1, −2)/√5.
        assert!((soft[0] * 2.0 + soft[1]).abs() < 1e-12);
    }

    #[test]
    fn well_conditioned_hessian_inverts() {
        let h = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 8.0]);
        let (cov, _, degenerate) = covariance_from_hessian(&h);
        assert!(!degenerate);
        assert!((cov[(0, 0)] - 1.0).abs() < 1e-12 && (cov[(1, 1)] - 0.25).abs() < 1e-12);
    }
}
