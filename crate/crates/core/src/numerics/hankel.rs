//! Zeroth-order Hankel transform pair for isotropic 2-D Fourier transforms:
//!
//! `C[k] = 2π ∫₀^∞ r J₀(kr) C(r) dr` and `C(r) = (1/2π) ∫₀^∞ k J₀(kr) C[k] dk`.
//!
//! The oscillatory integrand is integrated panel by panel between successive
//! zeros of `J₀`; for unbounded support the partial sums are accelerated with
//! Wynn's ε-algorithm.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use super::bessel::{j0, j0_zero};
use super::quadrature::Quadrature;
use crate::error::{Error, Result};

const MAX_CHUNKS: usize = 40;
const MAX_PANELS: usize = 200_000;

/// A real function on `[0, ∞)`, e.g. a correlation `C(r)` or a spectrum `C[k]`.
#[derive(Clone)]
pub struct RadialFunction {
    evaluator: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    decay_hint: f64,
    support: Option<f64>,
    breakpoints: Vec<f64>,
}

impl fmt::Debug for RadialFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialFunction")
            .field("decay_hint", &self.decay_hint)
            .field("support", &self.support)
            .field("breakpoints", &self.breakpoints)
            .finish_non_exhaustive()
    }
}

impl RadialFunction {
    /// `decay_hint` is the scale beyond which the function is negligible or decays algebraically.
    pub fn new(evaluator: impl Fn(f64) -> f64 + Send + Sync + 'static, decay_hint: f64) -> Self {
        RadialFunction {
            evaluator: Arc::new(evaluator),
            decay_hint,
            support: None,
            breakpoints: Vec::new(),
        }
    }

    /// Declares the function identically zero beyond `support`.
    pub fn with_support(mut self, support: f64) -> Self {
        self.support = Some(support);
        self
    }

    /// Points where the function or its derivatives are discontinuous.
    pub fn with_breakpoints(mut self, mut points: Vec<f64>) -> Self {
        points.retain(|p| p.is_finite() && *p > 0.0);
        points.sort_by(f64::total_cmp);
        self.breakpoints = points;
        self
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.evaluator)(x)
    }

    pub fn decay_hint(&self) -> f64 {
        self.decay_hint
    }

    pub fn support(&self) -> Option<f64> {
        self.support
    }
}

/// Isotropic 2-D Fourier transform of a real-space profile, evaluated at wavenumber `k`.
pub fn hankel_forward(c: &RadialFunction, k: f64) -> Result<f64> {
    Ok(2.0 * PI * hankel0(c, k)?)
}

/// Inverse transform of a spectrum, evaluated at radius `r`.
pub fn hankel_inverse(spectrum: &RadialFunction, r: f64) -> Result<f64> {
    Ok(hankel0(spectrum, r)? / (2.0 * PI))
}

/// `∫₀^∞ t J₀(xt) f(t) dt`.
pub fn hankel0(f: &RadialFunction, x: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::invalid("transform argument", format!("must be finite and ≥ 0, got {x}")));
    }
    let integrand = |t: f64| t * j0(x * t) * f.eval(t);
    let quad = Quadrature::new(1e-11).with_magnitude_tol(1e-12);

    if let Some(support) = f.support {
        let mut points = vec![0.0];
        if x > 0.0 {
            let mut m = 1;
            loop {
                let z = zero_position(m, x);
                if z >= support {
                    break;
                }
                points.push(z);
                m += 1;
                if m > MAX_PANELS {
                    return Err(Error::invalid("transform argument", "too many oscillations within support"));
                }
            }
        }
        points.extend(f.breakpoints.iter().copied().filter(|&p| p < support));
        points.push(support);
        points.sort_by(f64::total_cmp);
        points.dedup();
        return Ok(quad.integrate_with_breaks(integrand, &points)?.value);
    }

    if x == 0.0 {
        return doubling_tail(f, &integrand, &quad);
    }

    oscillatory_tail(f, x, &integrand, &quad)
}

fn zero_position(m: usize, x: f64) -> f64 {
    if m <= 50 {
        j0_zero(m) / x
    } else {
        // McMahon's expansion is exact to rounding this far out.
        let beta = (m as f64 - 0.25) * PI;
        (beta + 1.0 / (8.0 * beta) - 31.0 / (384.0 * beta.powi(3))) / x
    }
}

fn oscillatory_tail<F: Fn(f64) -> f64>(f: &RadialFunction, x: f64, integrand: &F, quad: &Quadrature) -> Result<f64> {
    let mut partial_sums: Vec<f64> = Vec::new();
    let mut sum = 0.0;
    let mut lo = 0.0;
    let mut negligible = 0;
    let mut last_extrapolation: Option<f64> = None;
    let mut agreements = 0;
    let mut scale: f64 = 0.0;
    for m in 1..=MAX_PANELS {
        let hi = zero_position(m, x);
        let mut points = vec![lo];
        points.extend(f.breakpoints.iter().copied().filter(|&p| p > lo && p < hi));
        points.push(hi);
        let panel = quad
            .with_abs_tol(1e-13 * scale)
            .integrate_with_breaks(integrand, &points)?
            .value;
        sum += panel;
        scale = scale.max(sum.abs());
        partial_sums.push(sum);
        lo = hi;

        if hi < f.decay_hint {
            continue;
        }
        if panel.abs() <= 1e-14 * sum.abs() || (panel == 0.0 && sum == 0.0) {
            negligible += 1;
            if negligible >= 3 {
                return Ok(sum);
            }
            continue;
        }
        negligible = 0;
        if partial_sums.len() >= 8 {
            let window = &partial_sums[partial_sums.len().saturating_sub(24)..];
            let estimate = wynn_epsilon(window);
            if let Some(prev) = last_extrapolation {
                if (estimate - prev).abs() <= 1e-11 * estimate.abs().max(1e-300) {
                    agreements += 1;
                    if agreements >= 3 {
                        return Ok(estimate);
                    }
                } else {
                    agreements = 0;
                }
            }
            last_extrapolation = Some(estimate);
        }
    }
    let n = partial_sums.len();
    Err(Error::Quadrature {
        context: format!("Hankel transform at argument {x:e} did not converge"),
        previous: partial_sums[n - 2],
        last: partial_sums[n - 1],
        error: (partial_sums[n - 1] - partial_sums[n - 2]).abs(),
    })
}

/// Zero-argument transform: chunks `[0, s]`, `[s, 2s]`, `[2s, 4s]`, … with Wynn
/// extrapolation of the partial sums, which handles algebraic tails.
fn doubling_tail<F: Fn(f64) -> f64>(f: &RadialFunction, integrand: &F, quad: &Quadrature) -> Result<f64> {
    let first = f
        .breakpoints
        .last()
        .copied()
        .unwrap_or(0.0)
        .max(f.decay_hint)
        .max(f64::MIN_POSITIVE);
    let mut partial_sums: Vec<f64> = Vec::new();
    let mut sum = 0.0;
    let mut scale: f64 = 0.0;
    let mut lo = 0.0;
    let mut hi = first;
    let mut negligible = 0;
    let mut last_extrapolation: Option<f64> = None;
    let mut last_change: Option<f64> = None;
    let mut agreements = 0;
    for _ in 0..MAX_CHUNKS {
        let mut points = vec![lo];
        points.extend(f.breakpoints.iter().copied().filter(|&p| p > lo && p < hi));
        points.push(hi);
        // Late chunks hold thousands of low-amplitude oscillations; resolve them only
        // to what matters for the total.
        let tail_quad = *quad;
        let chunk = match tail_quad
            .with_abs_tol(1e-12 * scale)
            .integrate_with_breaks(integrand, &points)
        {
            Ok(e) => e.value,
            // Out of panels deep in the tail: keep an extrapolation that has settled.
            Err(err) => match (last_extrapolation, last_change) {
                (Some(est), Some(change)) if change <= 1e-7 * est.abs() => return Ok(est),
                _ => return Err(err),
            },
        };
        sum += chunk;
        scale = scale.max(sum.abs());
        partial_sums.push(sum);
        lo = hi;
        hi *= 2.0;
        if chunk.abs() <= 1e-14 * sum.abs() || (chunk == 0.0 && sum == 0.0) {
            negligible += 1;
            if negligible >= 2 {
                return Ok(sum);
            }
            continue;
        }
        negligible = 0;
        if partial_sums.len() >= 6 {
            let window = &partial_sums[partial_sums.len().saturating_sub(16)..];
            let estimate = wynn_epsilon(window);
            if let Some(prev) = last_extrapolation {
                last_change = Some((estimate - prev).abs());
                if (estimate - prev).abs() <= 1e-9 * estimate.abs().max(1e-300) {
                    agreements += 1;
                    if agreements >= 2 {
                        return Ok(estimate);
                    }
                } else {
                    agreements = 0;
                }
            }
            last_extrapolation = Some(estimate);
        }
    }
    let n = partial_sums.len();
    Err(Error::Quadrature {
        context: "zero-argument Hankel transform did not converge".into(),
        previous: partial_sums[n - 2],
        last: partial_sums[n - 1],
        error: (partial_sums[n - 1] - partial_sums[n - 2]).abs(),
    })
}

/// Wynn's ε-algorithm; returns the last entry of the highest even column.
pub fn wynn_epsilon(sums: &[f64]) -> f64 {
    let n = sums.len();
    if n < 3 {
        return *sums.last().unwrap_or(&0.0);
    }
    // e[j] holds column k, prev holds column k-1.
    let mut prev = vec![0.0; n + 1];
    let mut cur: Vec<f64> = sums.to_vec();
    let mut best = sums[n - 1];
    let mut column = 0;
    while cur.len() > 1 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for j in 0..cur.len() - 1 {
            let diff = cur[j + 1] - cur[j];
            if diff == 0.0 || !diff.is_finite() {
                return best;
            }
            next.push(prev[j + 1] + 1.0 / diff);
        }
        prev = cur;
        cur = next;
        column += 1;
        if column % 2 == 0 {
            if let Some(&v) = cur.last() {
                if v.is_finite() {
                    best = v;
                }
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(sigma: f64) -> RadialFunction {
        RadialFunction::new(move |r: f64| (-r * r / (2.0 * sigma * sigma)).exp(), 6.0 * sigma)
    }

    #[test]
    fn gaussian_at_zero_wavenumber() {
        let v = hankel_forward(&gaussian(1.0), 0.0).unwrap();
        assert!((v - 2.0 * PI).abs() < 1e-10);
    }

    #[test]
    fn gaussian_forward_closed_form() {
        let sigma = 1.3;
        for &k in &[0.1, 0.7, 2.0, 5.0] {
            let v = hankel_forward(&gaussian(sigma), k).unwrap();
            let want = 2.0 * PI * sigma * sigma * (-k * k * sigma * sigma / 2.0).exp();
            assert!((v - want).abs() < 1e-9 * 2.0 * PI * sigma * sigma, "k={k}: {v} vs {want}");
        }
    }

    #[test]
    fn round_trip_gaussian() {
        let sigma = 1.0;
        let c = gaussian(sigma);
        let forward = {
            let c = c.clone();
            RadialFunction::new(move |k| hankel_forward(&c, k).unwrap(), 6.0 / sigma)
        };
        let mut r = 0.0;
        while r <= 5.0 * sigma {
            let back = hankel_inverse(&forward, r).unwrap();
            let want = c.eval(r);
            assert!((back - want).abs() <= 1e-6 * want.max(1e-6), "r={r}: {back} vs {want}");
            r += 0.5;
        }
    }

    #[test]
    fn algebraic_tail_with_acceleration() {
        // ∫₀^∞ t J₀(t) /(1+t²)^{3/2} dt = e^{-1}
        let f = RadialFunction::new(|t: f64| (1.0 + t * t).powf(-1.5), 1.0);
        let v = hankel0(&f, 1.0).unwrap();
        assert!((v - (-1.0f64).exp()).abs() < 1e-8, "{v}");
    }

    #[test]
    fn compact_support_annulus() {
        // ∫_a^b t J₀(xt) dt = [t J₁(xt)/x]_a^b
        use crate::numerics::bessel::j1;
        let (a, b, x) = (0.5, 3.0, 4.0);
        let f = RadialFunction::new(move |t| if t >= a && t <= b { 1.0 } else { 0.0 }, b)
            .with_support(b)
            .with_breakpoints(vec![a]);
        let v = hankel0(&f, x).unwrap();
        let want = (b * j1(x * b) - a * j1(x * a)) / x;
        assert!((v - want).abs() < 1e-12);
    }

    #[test]
    fn wynn_on_alternating_series() {
        // ln 2 = 1 - 1/2 + 1/3 - ...
        let mut s = 0.0;
        let sums: Vec<f64> = (1..=15)
            .map(|n| {
                s += if n % 2 == 1 { 1.0 } else { -1.0 } / n as f64;
                s
            })
            .collect();
        assert!((wynn_epsilon(&sums) - 2f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn rejects_negative_argument() {
        assert!(hankel_forward(&gaussian(1.0), -1.0).is_err());
    }
}
